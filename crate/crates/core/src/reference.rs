//! Bundled reference threshold values used as regression anchors.
//!
//! Each table lists, for one recovery notion and one exponent `q`, a set of
//! sparsity ratios with the corresponding aspect-ratio thresholds and the
//! dual parameters (and, for the weak notion, the worst-case signal
//! magnitude) at which the width bound was attained.  The values were
//! frozen from an independent high-precision computation and are reported
//! to the digits shown; recomputed thresholds are expected to agree to
//! within 0.01 (sectional / strong) or 0.015 (weak).

use crate::width_bound::ThresholdKind;

/// One row of a reference table.
#[derive(Debug, Clone, Copy)]
pub struct ReferenceRow {
    /// Sparsity ratio `k/n`.
    pub beta: f64,
    /// Aspect-ratio threshold `m/n`.
    pub alpha: f64,
    /// Worst-case signal magnitude (weak tables only).
    pub x_mag: Option<f64>,
    /// Minimizing dual `nu`.
    pub nu: f64,
    /// Minimizing dual `gamma`.
    pub gamma: f64,
}

/// One bundled reference table.
#[derive(Debug, Clone, Copy)]
pub struct ReferenceTable {
    /// Stable identifier used by the CLI (`sec-q05`, `weak-q03`, ...).
    pub id: &'static str,
    pub kind: ThresholdKind,
    pub q: f64,
    pub rows: &'static [ReferenceRow],
}

impl ReferenceTable {
    /// Agreement tolerance on `alpha` when recomputing this table.
    pub fn tolerance(&self) -> f64 {
        match self.kind {
            ThresholdKind::Sectional | ThresholdKind::Strong => 0.01,
            ThresholdKind::Weak => 0.015,
        }
    }
}

macro_rules! row {
    ($beta:expr, $alpha:expr, $nu:expr, $gamma:expr) => {
        ReferenceRow {
            beta: $beta,
            alpha: $alpha,
            x_mag: None,
            nu: $nu,
            gamma: $gamma,
        }
    };
    ($beta:expr, $alpha:expr, $x:expr, $nu:expr, $gamma:expr) => {
        ReferenceRow {
            beta: $beta,
            alpha: $alpha,
            x_mag: Some($x),
            nu: $nu,
            gamma: $gamma,
        }
    };
}

const SEC_Q05: [ReferenceRow; 11] = [
    row!(0.0050, 0.0405, 5.8112, 0.1005),
    row!(0.0200, 0.1299, 3.2935, 0.1800),
    row!(0.0400, 0.2262, 2.3730, 0.2372),
    row!(0.0600, 0.3091, 1.9152, 0.2775),
    row!(0.0900, 0.4173, 1.5033, 0.3222),
    row!(0.1200, 0.5112, 1.2328, 0.3565),
    row!(0.1500, 0.5938, 1.0329, 0.3841),
    row!(0.2000, 0.7105, 0.7910, 0.4199),
    row!(0.2500, 0.8051, 0.6021, 0.4475),
    row!(0.3200, 0.9046, 0.3906, 0.4740),
    row!(0.4500, 0.9974, 0.0866, 0.4977),
];

const SEC_Q03: [ReferenceRow; 11] = [
    row!(0.0050, 0.0436, 9.2019, 0.1039),
    row!(0.0100, 0.0780, 6.4961, 0.1398),
    row!(0.0300, 0.1900, 3.5738, 0.2174),
    row!(0.0500, 0.2821, 2.6101, 0.2649),
    row!(0.0800, 0.3992, 1.8927, 0.3152),
    row!(0.1100, 0.4991, 1.4778, 0.3520),
    row!(0.1500, 0.6124, 1.1231, 0.3900),
    row!(0.1900, 0.7073, 0.8727, 0.4192),
    row!(0.2400, 0.8042, 0.6335, 0.4471),
    row!(0.3100, 0.9047, 0.3965, 0.4741),
    row!(0.4500, 0.9992, 0.0667, 0.4983),
];

const SEC_Q01: [ReferenceRow; 11] = [
    row!(0.0010, 0.0139, 26.050, 0.0781),
    row!(0.0100, 0.0873, 9.2658, 0.1473),
    row!(0.0300, 0.2089, 4.5185, 0.2282),
    row!(0.0500, 0.3069, 3.1043, 0.2764),
    row!(0.0700, 0.3912, 2.3942, 0.3119),
    row!(0.1000, 0.4998, 1.7389, 0.3528),
    row!(0.1300, 0.5921, 1.3434, 0.3830),
    row!(0.1700, 0.6953, 0.9913, 0.4153),
    row!(0.2200, 0.7983, 0.6908, 0.4453),
    row!(0.2900, 0.9023, 0.4044, 0.4734),
    row!(0.4400, 0.9997, 0.0514, 0.4983),
];

const STR_Q05: [ReferenceRow; 11] = [
    row!(0.0005, 0.0138, 9.2604, 0.0587),
    row!(0.0050, 0.0919, 3.8721, 0.1563),
    row!(0.0150, 0.2114, 2.5000, 0.2267),
    row!(0.0250, 0.3081, 2.1680, 0.2612),
    row!(0.0400, 0.4142, 1.4450, 0.3217),
    row!(0.0550, 0.5053, 1.2500, 0.3499),
    row!(0.0750, 0.6030, 0.9423, 0.3881),
    row!(0.1000, 0.7006, 0.7368, 0.4183),
    row!(0.1400, 0.8156, 0.5141, 0.4514),
    row!(0.1800, 0.8944, 0.3577, 0.4727),
    row!(0.3200, 0.9998, 0.0286, 0.4996),
];

const STR_Q03: [ReferenceRow; 11] = [
    row!(0.0005, 0.0132, 17.763, 0.0568),
    row!(0.0050, 0.0879, 5.6990, 0.1563),
    row!(0.0150, 0.2020, 3.2832, 0.2245),
    row!(0.0250, 0.2918, 2.6563, 0.2582),
    row!(0.0400, 0.3968, 1.7745, 0.3147),
    row!(0.0600, 0.5100, 1.3136, 0.3567),
    row!(0.0800, 0.6007, 1.0333, 0.3872),
    row!(0.1000, 0.6752, 0.8362, 0.4104),
    row!(0.1400, 0.7888, 0.5737, 0.4436),
    row!(0.2000, 0.8995, 0.3330, 0.4737),
    row!(0.3600, 0.9999, 0.0259, 0.4994),
];

const STR_Q01: [ReferenceRow; 11] = [
    row!(0.0005, 0.0128, 34.531, 0.0562),
    row!(0.0050, 0.0858, 8.5931, 0.1563),
    row!(0.0150, 0.1966, 4.5230, 0.2215),
    row!(0.0250, 0.2843, 3.5547, 0.2518),
    row!(0.0400, 0.3862, 2.1967, 0.3125),
    row!(0.0600, 0.4963, 1.5735, 0.3519),
    row!(0.0850, 0.6045, 1.1320, 0.3883),
    row!(0.1200, 0.7187, 0.7736, 0.4234),
    row!(0.1600, 0.8132, 0.5276, 0.4504),
    row!(0.2200, 0.9070, 0.3035, 0.4756),
    row!(0.4000, 0.9991, 0.0223, 0.4993),
];

const WEAK_Q05: [ReferenceRow; 11] = [
    row!(0.0050, 0.0274, 7.4176, 6.7123, 0.0830),
    row!(0.0200, 0.0851, 4.5521, 3.8539, 0.1505),
    row!(0.0600, 0.1981, 2.5595, 2.4321, 0.2212),
    row!(0.1100, 0.3071, 2.0168, 1.7927, 0.2812),
    row!(0.1600, 0.3995, 1.7742, 1.4733, 0.3178),
    row!(0.2400, 0.5212, 1.3513, 1.1500, 0.3470),
    row!(0.3200, 0.6257, 1.2865, 0.9033, 0.3931),
    row!(0.4000, 0.7117, 1.2250, 0.7319, 0.4206),
    row!(0.5200, 0.8185, 1.2925, 0.5583, 0.4535),
    row!(0.6400, 0.9006, 1.3074, 0.3900, 0.4777),
    row!(0.9200, 0.9990, 1.6199, 0.0442, 0.5018),
];

const WEAK_Q03: [ReferenceRow; 11] = [
    row!(0.0010, 0.0081, 9.7741, 22.565, 0.0442),
    row!(0.0200, 0.0958, 2.9006, 5.4895, 0.1519),
    row!(0.0500, 0.1913, 1.6855, 3.3171, 0.2213),
    row!(0.0900, 0.2914, 1.5349, 2.3060, 0.2785),
    row!(0.1400, 0.3985, 0.8705, 1.7590, 0.3080),
    row!(0.2000, 0.5054, 0.8734, 1.3475, 0.3436),
    row!(0.2800, 0.6188, 0.8656, 0.9736, 0.3885),
    row!(0.3600, 0.7110, 0.9196, 0.7632, 0.4258),
    row!(0.4400, 0.7889, 0.8888, 0.5694, 0.4436),
    row!(0.6000, 0.8993, 0.9157, 0.3784, 0.4737),
    row!(0.9200, 0.9991, 1.4012, 0.0368, 0.5006),
];

const TABLES: [ReferenceTable; 8] = [
    ReferenceTable {
        id: "sec-q05",
        kind: ThresholdKind::Sectional,
        q: 0.5,
        rows: &SEC_Q05,
    },
    ReferenceTable {
        id: "sec-q03",
        kind: ThresholdKind::Sectional,
        q: 0.3,
        rows: &SEC_Q03,
    },
    ReferenceTable {
        id: "sec-q01",
        kind: ThresholdKind::Sectional,
        q: 0.1,
        rows: &SEC_Q01,
    },
    ReferenceTable {
        id: "str-q05",
        kind: ThresholdKind::Strong,
        q: 0.5,
        rows: &STR_Q05,
    },
    ReferenceTable {
        id: "str-q03",
        kind: ThresholdKind::Strong,
        q: 0.3,
        rows: &STR_Q03,
    },
    ReferenceTable {
        id: "str-q01",
        kind: ThresholdKind::Strong,
        q: 0.1,
        rows: &STR_Q01,
    },
    ReferenceTable {
        id: "weak-q05",
        kind: ThresholdKind::Weak,
        q: 0.5,
        rows: &WEAK_Q05,
    },
    ReferenceTable {
        id: "weak-q03",
        kind: ThresholdKind::Weak,
        q: 0.3,
        rows: &WEAK_Q03,
    },
];

/// All bundled reference tables, in a stable order.
pub fn all_tables() -> &'static [ReferenceTable] {
    &TABLES
}

/// Look up a table by its stable identifier.
pub fn by_id(id: &str) -> Option<&'static ReferenceTable> {
    TABLES.iter().find(|t| t.id == id)
}
