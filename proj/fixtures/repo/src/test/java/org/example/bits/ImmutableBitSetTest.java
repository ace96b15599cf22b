package org.example.bits;

import java.util.BitSet;
import org.junit.Assert;
import org.junit.Test;

public class ImmutableBitSetTest {

  @Test
  public void testLength() {
    BitSet bset = new BitSet();
    ImmutableBitSet ibset = new ImmutableBitSet(bset);
    Assert.assertEquals(bset.length(), ibset.length());
  }

  // Two asserts: not a candidate.
  @Test
  public void testGetAndCardinality() {
    BitSet bset = new BitSet();
    bset.set(3);
    ImmutableBitSet ibset = new ImmutableBitSet(bset);
    Assert.assertTrue(ibset.get(3));
    Assert.assertEquals(1, ibset.cardinality());
  }

  // No @Test annotation: not a candidate.
  public void checkCardinality(ImmutableBitSet ibset) {
    Assert.assertEquals(0, ibset.cardinality());
  }

  // The only invocation is a constructor, so no focal method resolves.
  @Test
  public void testConstruct() {
    ImmutableBitSet ibset = new ImmutableBitSet(new BitSet());
    Assert.assertNotNull(ibset);
  }

  @Test
  public void testCardinalityMultiLine() {
    BitSet bset = new BitSet();
    bset.set(1); /* set a bit */
    ImmutableBitSet ibset = new ImmutableBitSet(bset);
    Assert.assertEquals(
        1,
        ibset.cardinality());  // trailing comment
  }
}
