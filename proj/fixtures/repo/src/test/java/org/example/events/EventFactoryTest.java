package org.example.events;

import org.junit.Assert;
import org.junit.Test;

public class EventFactoryTest {
  private final EventFactory eventFactory = new EventFactory();

  @Test
  public void createBeginNwhinInvocation() {
    Event event = eventFactory.createBeginNwhinInvocation();
    Assert.assertTrue(event instanceof BeginNwhinInvocationEvent);
  }
}
