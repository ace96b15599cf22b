package org.example.events;

public class BeginNwhinInvocationEvent implements Event {
  @Override
  public String name() {
    return "BeginNwhinInvocation";
  }
}
