package org.example.cache;

import java.util.LinkedHashMap;
import java.util.Map;

public class LRU {
  private final Map<Long, Long> m_lruMap;
  private final int capacity;

  public LRU(int capacity, boolean accessOrder) {
    this.capacity = capacity;
    this.m_lruMap = new LinkedHashMap<>(capacity, 0.75f, accessOrder);
  }

  public Long add(long id) {
    Long evicted = null;
    if (m_lruMap.size() >= capacity) {
      evicted = m_lruMap.keySet().iterator().next();
      m_lruMap.remove(evicted);
    }
    m_lruMap.put(id, id);
    return evicted;
  }

  public boolean exists(long id) { return m_lruMap.containsKey(id); }
}
