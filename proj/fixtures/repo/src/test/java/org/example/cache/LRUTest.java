package org.example.cache;

import static org.junit.Assert.assertEquals;
import static org.junit.Assert.assertNull;

import org.junit.Assert;
import org.junit.Test;

public class LRUTest {

  private static LRU LRU(int size, boolean accessOrder) {
    return new LRU(size, accessOrder);
  }

  private static void addAndExpectNoEviction(LRU lru, long id) {
    assertNull(lru.add(id));
  }

  private static void addAndExpectEviction(LRU lru, long id, long evicted) {
    assertEquals(Long.valueOf(evicted), lru.add(id));
  }

  @Test
  public void simpleInsertTest() {
    LRU lru = LRU(5, true);
    for (int i = 0; i < 5; i++) {
      addAndExpectNoEviction(lru, (100 + i));
    }

    for (int i = 5; i < 10; i++) {
      addAndExpectEviction(lru, (100 + i), ((100 + i) - 5));
    }
    for (int i = 5; i < 10; i++) {
      Assert.assertTrue(lru.exists(100 + i));
    }
  }
}
