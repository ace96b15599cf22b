package org.apache.commons.lang3.math;

import java.math.BigDecimal;
import java.math.BigInteger;

// Trimmed stand-in for the focal class: signatures only matter for scope checks.
public class NumberUtils {
    public static final Long LONG_ZERO = Long.valueOf(0L);
    public static final Integer INTEGER_ONE = Integer.valueOf(1);

    public NumberUtils() {
    }

    public static int toInt(final String str) {
        return toInt(str, 0);
    }

    public static int toInt(final String str, final int defaultValue) {
        if (str == null) {
            return defaultValue;
        }
        try {
            return Integer.parseInt(str);
        } catch (final NumberFormatException nfe) {
            return defaultValue;
        }
    }

    public static long toLong(final String str, final long defaultValue) {
        if (str == null) {
            return defaultValue;
        }
        try {
            return Long.parseLong(str);
        } catch (final NumberFormatException nfe) {
            return defaultValue;
        }
    }

    public static float toFloat(final String str, final float defaultValue) {
        if (str == null) {
            return defaultValue;
        }
        try {
            return Float.parseFloat(str);
        } catch (final NumberFormatException nfe) {
            return defaultValue;
        }
    }

    public static double toDouble(final String str, final double defaultValue) {
        if (str == null) {
            return defaultValue;
        }
        try {
            return Double.parseDouble(str);
        } catch (final NumberFormatException nfe) {
            return defaultValue;
        }
    }

    public static byte toByte(final String str, final byte defaultValue) {
        if (str == null) {
            return defaultValue;
        }
        try {
            return Byte.parseByte(str);
        } catch (final NumberFormatException nfe) {
            return defaultValue;
        }
    }

    public static short toShort(final String str, final short defaultValue) {
        if (str == null) {
            return defaultValue;
        }
        try {
            return Short.parseShort(str);
        } catch (final NumberFormatException nfe) {
            return defaultValue;
        }
    }

    public static Float createFloat(final String str) {
        return str == null ? null : Float.valueOf(str);
    }

    public static Double createDouble(final String str) {
        return str == null ? null : Double.valueOf(str);
    }

    public static Integer createInteger(final String str) {
        return str == null ? null : Integer.decode(str);
    }

    public static Long createLong(final String str) {
        return str == null ? null : Long.decode(str);
    }

    public static BigInteger createBigInteger(final String str) {
        return str == null ? null : new BigInteger(str);
    }

    public static BigDecimal createBigDecimal(final String str) {
        if (str == null) {
            return null;
        }
        if (str.trim().startsWith("--")) {
            throw new NumberFormatException(str + " is not a valid number.");
        }
        return new BigDecimal(str);
    }

    public static long min(final long[] array) {
        long min = array[0];
        for (int i = 1; i < array.length; i++) {
            if (array[i] < min) {
                min = array[i];
            }
        }
        return min;
    }

    public static int min(int a, final int b, final int c) {
        if (b < a) {
            a = b;
        }
        if (c < a) {
            a = c;
        }
        return a;
    }

    public static float max(final float[] array) {
        float max = array[0];
        for (int j = 1; j < array.length; j++) {
            max = Math.max(max, array[j]);
        }
        return max;
    }

    public static byte max(byte a, final byte b, final byte c) {
        if (b > a) {
            a = b;
        }
        if (c > a) {
            a = c;
        }
        return a;
    }

    public static boolean isDigits(final String str) {
        for (int i = 0; i < str.length(); i++) {
            if (!Character.isDigit(str.charAt(i))) {
                return false;
            }
        }
        return !str.isEmpty();
    }

    public static boolean isNumber(final String str) {
        return isDigits(str);
    }
}
