"""Published constants for the closed and open elasticae and quadratic-model curves.

Values are copied as printed (six or so significant digits). ``TABLES`` maps
the table number used by ``reproduce_table`` to a list of ``(label, params)``.
"""

import math

from .critical import ElasticaParams, QuadraticModelParams

PI = math.pi

TABLE1 = [
    ("circumference", ElasticaParams(1.00824, 0.0, 1.01227, 0.0003, 2 * PI)),
    ("lemniscate", ElasticaParams(0.07911031, 0.0, 0.0442, 0.046801, 12 * PI)),
]

# Free planar elasticae; the third row prints kappa1 as "0,001" (decimal comma).
TABLE2 = [
    ("fig6", ElasticaParams(0.08, 0.0, 0.25, 0.0, 22 * PI)),
    ("fig5", ElasticaParams(0.08, 0.0, 0.06, 0.0, 21 * PI)),
    ("fig1", ElasticaParams(0.5, 0.0, 0.0, 0.001, 8 * PI)),
    ("fig2", ElasticaParams(math.sqrt(2), 0.0, 0.0, 0.5, 8 * PI)),
    ("fig4", ElasticaParams(1.0, 0.0, 1.0, -1.0, 8 * PI)),
    ("fig8", ElasticaParams(0.3, 0.0, 0.91, 1.43, 8 * PI)),
]

TABLE3 = [
    ("4a", ElasticaParams(1.25316, 3.92702, 1.58313, 0.528316, 16 * PI)),
    ("4b", ElasticaParams(0.08, 5.06, 2.53458, 4.04, 3 * PI)),
    ("4c", ElasticaParams(2.06465, 4.38778, 1.51781, 1.47094, 16 * PI)),
    ("4d", ElasticaParams(1.62767, 4.08942, 2.85503, 0.669953, 30 * PI)),
]

# Open space elasticae (not one of the numbered reproduction tables).
OPEN_SPACE = [
    ("5a", ElasticaParams(6.85389, 7.80699, 3.97779, 1.48377, 6 * PI)),
    ("5b", ElasticaParams(3.76699, 6.25666, 3.78912, 3.05338, 8 * PI)),
    ("5c", ElasticaParams(0.700994, 4.99512, 0.478556, 3.74012, 25 * PI)),
    ("5d", ElasticaParams(0.794876, 6.57172, 0.899095, 1.12241, 7 * PI)),
]

TABLE4 = [
    ("7a", QuadraticModelParams(-0.1, 0.787616, 3.33006, 1.00144, 4.69347, 4.29121,
                                0.929236143)),
    ("7b", QuadraticModelParams(0.01, 3.05775, 4.22982, 0.749952, 0.997559, 3.02353,
                                0.8734864103)),
    ("7c", QuadraticModelParams(1.03, 1.95093, 1.6048, 8.21105, 0.508862, 3.25462,
                                1.0579039889)),
]

TABLES = {1: TABLE1, 2: TABLE2, 3: TABLE3, 4: TABLE4}
