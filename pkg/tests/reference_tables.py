"""Reference regression and decomposition tables.

Coefficient / odds-ratio columns from a published two-group logit
analysis of household-survey morbidity reporting (one national model
pair, one state-level pair).  These are arithmetic fixtures only — no
microdata involved: exp(coef) must reproduce the OR column.

The state-level table carries sign typos in a few rows (coef and OR
disagree in direction), so it is checked in magnitude: |coef| vs
|ln OR|.  Constant rows print the OR with fewer significant digits
than the other rows (e.g. 0.022536), so their reproduction error is
bounded by display rounding (~2.4e-5 relative) rather than 5e-6.
"""

# (term, coefficient, odds ratio); constants listed separately
NATIONAL_WOMEN = [
    ("Urban", 0.1244415, 1.132516),
    ("Age 20-24", 0.1972605, 1.218061),
    ("Age 25-29", 0.4623972, 1.587876),
    ("Age 30-34", 0.7560003, 2.129741),
    ("Age 35-39", 1.001932, 2.723539),
    ("Age 40-44", 1.243828, 3.468865),
    ("Age 45-49", 1.44431, 4.238926),
    ("No education", -0.2573534, 0.773095),
    ("Primary", -0.0380052, 0.962708),
    ("Higher", -0.1405266, 0.868901),
    ("Muslim", 0.2003768, 1.221863),
    ("Christian", 0.2201928, 1.246317),
    ("Other religions", 0.2322519, 1.261437),
    ("Members 6-10", 0.0402068, 1.041026),
    ("Members 11-15", 0.1748157, 1.191027),
    ("Members 16 and above", 0.0538623, 1.055339),
    ("Poorest", -0.0430375, 0.957876),
    ("Middle", 0.0638987, 1.065984),
    ("Richer", 0.0887251, 1.09278),
    ("Richest", 0.0613304, 1.06325),
    ("Covered by health insurance", 0.0861807, 1.090003),
    ("Never in union", -0.1281484, 0.879723),
    ("Widowed", 0.0720444, 1.074703),
    ("Divorced/separated", 0.2656667, 1.3043),
    ("ST/SC", -0.0048312, 0.99518),
    ("Forward Castes", 0.1501797, 1.162043),
]
NATIONAL_WOMEN_CONSTANT = (-2.809795, 0.060217)
NATIONAL_WOMEN_N = 724115

NATIONAL_MEN = [
    ("Urban", 0.0098166, 1.009865),
    ("Age 20-24", 0.3430215, 1.409199),
    ("Age 25-29", 0.5902815, 1.804496),
    ("Age 30-34", 0.899009, 2.457167),
    ("Age 35-39", 1.127834, 3.088957),
    ("Age 40-44", 1.548523, 4.704515),
    ("Age 45-49", 1.784688, 5.957719),
    ("Age 50-54", 2.10275, 8.18866),
    ("No education", -0.1506286, 0.860167),
    ("Primary", -0.0162434, 0.983888),
    ("Higher", -0.0044044, 0.995605),
    ("Muslim", 0.114018, 1.120772),
    ("Christian", 0.198419, 1.219473),
    ("Other religions", 0.1820982, 1.199732),
    ("Members 6-10", -0.1641056, 0.848652),
    ("Members 11-15", 0.0180439, 1.018208),
    ("Members 16 and above", 0.4353902, 1.545566),
    ("Poorest", -0.1768101, 0.837939),
    ("Middle", 0.0213537, 1.021583),
    ("Richer", 0.0951966, 1.099875),
    ("Richest", 0.1224861, 1.130303),
    ("Covered by health insurance", 0.1541386, 1.166653),
    ("Never in union", -0.2111966, 0.809615),
    ("Widowed", -0.1757134, 0.838858),
    ("Divorced/separated", 0.1807225, 1.198083),
    ("ST/SC", -0.0589431, 0.942761),
    ("Forward Castes", 0.1379237, 1.147888),
]
NATIONAL_MEN_CONSTANT = (-3.79266, 0.022536)
NATIONAL_MEN_N = 101839

STATE_WOMEN = [
    ("Urban", 0.0110817, 1.011143),
    ("Age 20-24", 0.1418633, 1.152419),
    ("Age 25-29", 0.3899741, 1.476942),
    ("Age 30-34", 0.6393498, 1.895248),
    ("Age 35-39", 0.8475514, 2.333925),
    ("Age 40-44", 1.048411, 2.853114),
    ("Age 45-49", 1.212863, 3.363098),
    ("No education", -0.0818086, 0.9214483),
    ("Primary", -0.0212582, 0.9789662),
    ("Higher", 0.1555568, 0.8559384),
    ("Muslim", 0.2154686, 1.240443),
    ("Christian", 0.3422594, 1.408126),
    ("Other religions", 0.2146037, 1.239371),
    ("Members 6-10", 0.2056624, 1.228338),
    ("Members 11-15", 0.7763196, 2.173458),
    ("Members 16 and above", 0.6988275, 2.011393),
    ("Poorest", -0.0087606, 0.9912776),
    ("Poorer", -0.0411764, 0.9596598),
    ("Richer", 0.0013915, 1.001392),
    ("Richest", 0.1255703, 0.8819937),
    ("Covered by health insurance", 0.2003719, 1.221857),
    ("Never in union", 0.103858, 1.109443),
    ("Widowed", -0.0732621, 0.9293572),
    ("Divorced/separated", 0.1310445, 1.140018),
    ("ST/SC", -0.0983061, 0.9063714),
    ("OBC", 0.0342236, 1.034816),
]
STATE_WOMEN_CONSTANT = (-2.560447, 0.0772702)
STATE_WOMEN_N = 33755

STATE_MEN = [
    ("Urban", 0.0779442, 1.081062),
    ("Age 20-24", 0.9146134, 2.49581),
    ("Age 25-29", 0.8191985, 2.268681),
    ("Age 30-34", 1.247758, 3.482526),
    ("Age 35-39", 1.467758, 4.339497),
    ("Age 40-44", 1.887119, 6.600324),
    ("Age 45-49", 2.100116, 8.167121),
    ("Age 50-54", 2.23145, 9.313361),
    ("No education", -0.5571914, 0.5728156),
    ("Primary", -0.1518717, 0.8590985),
    ("Higher", -0.0882174, 0.9155618),
    ("Muslim", 0.5800391, 0.5598765),
    ("Christian", -0.5954023, 0.5513407),
    ("Other religions", -0.1623664, 0.8501297),
    ("Members 6-10", -0.1286034, 0.8793226),
    ("Members 11-15", 0.4261255, 1.531313),
    ("Poorest", 0.2523457, 1.287041),
    ("Poorer", -0.00985, 0.9901984),
    ("Richer", -0.017488, 0.982664),
    ("Richest", 0.2537771, 1.288884),
    ("Covered by health insurance", 0.0358877, 1.036539),
    ("Never in union", -0.1014279, 0.9035463),
    ("Widowed", 1.43233, 4.188446),
    ("Divorced/separated", -1.168114, 0.3109528),
    ("ST/SC", -0.0740438, 0.928631),
    ("OBC", -0.0345502, 0.9660399),
]
STATE_MEN_CONSTANT = (-3.87528, 0.020749)
STATE_MEN_N = 5482

# decomposition summary blocks from the same analysis
NATIONAL_SUMMARY = {
    "n_total": 825954,
    "n1": 101839,  # men
    "n2": 724115,  # women
    "p1": 0.0659178,
    "p2": 0.1235260,
    "difference": -0.0576082,
    "total_explained": 0.0036942,
    "pct_explained": -6.4126,
}
STATE_SUMMARY = {
    "n_total": 39252,
    "n1": 5497,
    "n2": 33755,
    "p1": 0.07294888,
    "p2": 0.14214190,
    "difference": -0.06919302,
    "total_explained": -0.00199674,
    "pct_explained": 2.88575,
}

# detail rows: (term, contribution, published % of the gap); the two
# oldest age-band rows are omitted — their printed percentages flip the
# sign that 100*coef/difference gives and cannot be reproduced
NATIONAL_CONTRIBUTIONS = [
    ("Urban", 0.0002918, -0.5065),
    ("Age 25-29", -0.001724, 2.9926),
    ("No education", 0.0026857, -4.6620),
    ("Covered by health insurance", 0.0004192, -0.7277),
    ("Never in union", -0.0016118, 2.7979),
]
