package org.example.events;

public class EventFactory {
  public BeginNwhinInvocationEvent createBeginNwhinInvocation() {
    return new BeginNwhinInvocationEvent();
  }
}
