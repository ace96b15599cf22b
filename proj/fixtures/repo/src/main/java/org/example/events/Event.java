package org.example.events;

public interface Event {
  String name();
}
