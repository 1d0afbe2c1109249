"""Benchmark prices published with the method, used by the ``table`` command and the tests.

All cases: KoBoL with lambda_+ = 1, lambda_- = -2, m2 = 0.1, mu = 0, barriers h = -0.05, 0.05,
spots x = -0.04, -0.02, 0, 0.02, 0.04.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional, Tuple

SPOTS = (-0.04, -0.02, 0.0, 0.02, 0.04)
H_MINUS, H_PLUS = -0.05, 0.05
LAMBDA_PLUS, LAMBDA_MINUS, M2 = 1.0, -2.0, 0.1


@dataclass(frozen=True)
class BenchmarkTable:
    name: str
    kind: str
    nu: float
    a: Optional[float]
    rows: Dict[float, Tuple[float, ...]]
    # Rows whose values are quoted in units of 1e-12 and only agree in relative terms.
    scale: Dict[float, float]


TABLES = {
    # Table 1: no-touch, nu = 1.2.
    "table1": BenchmarkTable("table1", "notouch", 1.2, None, {
        0.004: (0.944232464403407, 0.984791837906914, 0.988695065999628, 0.985130282346314, 0.945243176095013),
        0.25: (0.0925697509133228, 0.183597478719832, 0.216239237263554, 0.187081211429371, 0.0961682820257716),
        1.0: (0.000488706725350729, 0.000970205697557125, 0.00114386828643243, 0.000989805061225368,
              0.000508651147353323),
    }, {}),
    # Table 2: no-touch, nu = 0.2.
    "table2": BenchmarkTable("table2", "notouch", 0.2, None, {
        0.004: (0.997159234166403, 0.99785039353072, 0.997988709856923, 0.997873055193352, 0.997205955464661),
        0.25: (0.837255746301533, 0.872998705974284, 0.880407965481731, 0.87420738492834, 0.83967624398896),
        3.0: (0.133264677579268, 0.179416477579805, 0.192359856627979, 0.181619873768539, 0.136797832249264),
    }, {}),
    # Table 3: digital put a = -0.01, nu = 1.2.
    "table3": BenchmarkTable("table3", "digital", 1.2, -0.01, {
        0.004: (0.936033131420221, 0.942743923266939, 0.0407165015135701, 0.00756840253469884,
                0.00309395728748227),
        0.25: (0.0367167500936684, 0.0706406957622098, 0.0786094461300362, 0.0641355992734415,
               0.0319013015638287),
        1.0: (0.000177771957381001, 0.000352921137775741, 0.000416090671743419, 0.000360047453580148,
              0.000185024416500812),
    }, {}),
    # Table 4: digital put a = -0.01, nu = 0.2.
    "table4": BenchmarkTable("table4", "digital", 0.2, -0.01, {
        0.004: (0.996564411171869, 0.99657921660561, 0.00112224938146623, 0.000499111365249944,
                0.00031397891513379),
        0.25: (0.806048752314656, 0.808342339586413, 0.0564741685789332, 0.0263104606596591,
               0.0165845924903516),
        3.0: (0.0826482000571708, 0.0963948765801401, 0.064756560941078, 0.0445502961594203,
              0.0292378743031199),
    }, {}),
    # Table 5: call a = 0, nu = 1.2; the T = 3 row is in units of 1e-12.
    "table5": BenchmarkTable("table5", "call", 1.2, 0.0, {
        0.004: (0.0000824404624213168, 0.000204166217898571, 0.00191177395953069, 0.0197639609828199,
                0.0376099511198009),
        0.25: (0.00082409621567, 0.00169255391432158, 0.00212237950197215, 0.00195192815759268,
               0.0010370403093618),
        1.0: (4.80103589597936e-06, 9.53128787591073e-06, 0.0000112373996155185, 9.72392418717438e-06,
              4.99704769890697e-06),
        3.0: (4.074629523e-12, 8.089334758e-12, 9.537398649e-12, 8.252398764e-12, 4.240829909e-12),
    }, {3.0: 1e-12}),
    # Table 6: call a = 0, nu = 0.2.
    "table6": BenchmarkTable("table6", "call", 0.2, 0.0, {
        0.004: (8.77581627294074e-06, 0.0000140126705130402, 0.0000365669756568704, 0.0201495491781489,
                0.0406572530052907),
        0.25: (0.000461949526934386, 0.000737018983172683, 0.001757476257127, 0.0171789730510928,
               0.032229359938136),
        3.0: (0.00080243923836716, 0.00124070584073691, 0.00182400986139031, 0.00268682684255628,
              0.00274066739944123),
        5.0: (0.000327733526265667, 0.000493515765859709, 0.000630026253687271, 0.000720082418558615,
              0.000595670818077265),
    }, {}),
}
