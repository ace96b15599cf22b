package org.example.text;

public class Builder {
  private int size;

  public Builder withSize(int size) {
    this.size = size;
    return this;
  }

  public int size() {
    return size;
  }
}
