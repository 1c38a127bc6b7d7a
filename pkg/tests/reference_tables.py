"""Printed root data for the quartic series: roots near -4 and near -6.

Rows k = 5..9 of CLUSTER_4_ABSOLUTE are absolute root values re +- i im;
every other entry is the offset nu + 2M, kept as the printed string so the
number of displayed digits is available to the comparison.
"""

CLUSTER_4_ABSOLUTE = {
    5: ("-3.22834", "0.426293"),
    6: ("-3.44545", "0"),
    7: ("-3.63083", "0.34226"),
    8: ("-3.76443", "0"),
    9: ("-3.9583", "0.226557"),
}

CLUSTER_4_OFFSET = {
    10: "+0.04231592827",
    11: "-0.01231265412",
    12: "+0.00178433080",
    13: "-0.00027422590",
    14: "+0.00003787462",
    15: "-4.86252995e-6",
    16: "+5.80950053e-7",
    17: "-6.49387664e-8",
    18: "+6.81906230e-9",
    19: "-6.75145346e-10",
    20: "+6.32321355e-11",
    21: "-5.61842521e-12",
    22: "+4.74864227e-13",
    23: "-3.82680164e-14",
    24: "+2.94682238e-15",
    25: "-2.17261017e-16",
    26: "+1.53640755e-17",
    27: "-1.04388321e-18",
    28: "+6.82474923e-20",
    29: "-4.29961693e-21",
    30: "+2.61370107e-22",
    31: "-1.53497157e-23",
    32: "+8.71891707e-25",
    33: "-4.79523448e-26",
    34: "+2.55611474e-27",
    35: "-1.32186040e-28",
    36: "+6.63762841e-30",
    37: "-3.23912410e-31",
    38: "+1.53735607e-32",
    39: "-7.10198670e-34",
    40: "+3.19560318e-35",
    41: "-1.40147930e-36",
    42: "+5.99459657e-38",
    43: "-2.50229008e-39",
    44: "+1.01993415e-40",
    45: "-4.06166432e-42",
    46: "+1.58111340e-43",
    47: "-6.01961315e-45",
    48: "+2.24249068e-46",
    49: "-8.17805838e-48",
    50: "+2.92092144e-49",
    51: "-1.02217301e-50",
    52: "+3.50623616e-52",
    53: "-1.17934411e-53",
    54: "+3.89122545e-55",
    55: "-1.25990087e-56",
    56: "+4.00444478e-58",
    57: "-1.24982870e-59",
    58: "+3.83179265e-61",
    59: "-1.15433788e-62",
    60: "+3.41802128e-64",
}

CLUSTER_6_OFFSET = {
    21: "+0.03432898",
    22: "-0.011016",
    23: "+0.0020276",
    24: "-0.00040899",
    25: "+0.000076759",
    26: "-0.000013876",
    27: "+2.40442e-6",
    28: "-4.00519e-7",
    29: "+6.42173e-8",
    30: "-9.92472e-9",
    31: "+1.48040e-9",
    32: "-2.13385e-10",
    33: "+2.97550e-11",
    34: "-4.01814e-12",
    35: "+5.26006e-13",
    36: "-6.68131e-14",
    37: "+8.24173e-15",
    38: "-9.88147e-16",
    39: "+1.15242e-16",
    40: "-1.30830e-17",
    41: "+1.44684e-18",
    42: "-1.55969e-19",
    43: "+1.63996e-20",
    44: "-1.68294e-21",
    45: "+1.68654e-22",
    46: "-1.65141e-23",
    47: "+1.58077e-24",
    48: "-1.47999e-25",
    49: "+1.35591e-26",
    50: "-1.21614e-27",
    51: "+1.06834e-28",
    52: "-9.19592e-30",
    53: "+7.75910e-31",
    54: "-6.41992e-32",
    55: "+5.21090e-33",
    56: "-4.15065e-34",
    57: "+3.24558e-35",
    58: "-2.49222e-36",
    59: "+1.87991e-37",
    60: "-1.39342e-38",
}
