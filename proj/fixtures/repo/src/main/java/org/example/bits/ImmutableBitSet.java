package org.example.bits;

import java.util.BitSet;

/** Read-only view over a {@link BitSet}. */
public final class ImmutableBitSet {
  private final BitSet bitSet;

  public ImmutableBitSet(BitSet bitSet) {
    this.bitSet = (BitSet) bitSet.clone();
  }

  public boolean get(int index) {
    return bitSet.get(index);
  }

  public int cardinality() {
    return bitSet.cardinality();
  }

  @Override
  public int hashCode() {
    return bitSet.hashCode();
  }

  public int length() {
    return this.bitSet.length();
  }
}
