#![allow(dead_code)]

/// A published table cell: inputs, approximation, control-variate Monte-Carlo
/// estimate and its standard error.
#[derive(Debug, Clone, Copy)]
pub struct PublishedCell {
    pub s0: f64,
    pub k: f64,
    pub b: f64,
    pub t: f64,
    pub approx: f64,
    pub mcv: f64,
    pub se: f64,
}

type Row = (f64, f64, f64, [(f64, f64, f64); 3]);

const MATURITIES: [f64; 3] = [0.5, 1.0, 1.5];

const TABLE1: [Row; 9] = [
    (57.0, 63.0, 60.0, [(1.2886, 1.2828, 0.0087), (2.4889, 2.5103, 0.0127), (3.4720, 3.5082, 0.0158)]),
    (58.0, 63.0, 60.0, [(1.4739, 1.4864, 0.0081), (2.7201, 2.7566, 0.0112), (3.7257, 3.7531, 0.0132)]),
    (59.0, 63.0, 60.0, [(1.6747, 1.6863, 0.0194), (2.9622, 2.9982, 0.0088), (3.9878, 4.0251, 0.0100)]),
    (60.0, 63.0, 63.0, [(2.4187, 2.4414, 0.0122), (3.8050, 3.8491, 0.0160), (4.8783, 4.9095, 0.0178)]),
    (60.0, 64.0, 63.0, [(2.0400, 2.0585, 0.0113), (3.4023, 3.4367, 0.0149), (4.4704, 4.4746, 0.0162)]),
    (60.0, 65.0, 63.0, [(1.7079, 1.7226, 0.0105), (3.0328, 3.0610, 0.0141), (4.0893, 4.1146, 0.0161)]),
    (70.0, 75.0, 72.0, [(2.0299, 2.0501, 0.0095), (3.5694, 3.5975, 0.0126), (4.7936, 4.8402, 0.0145)]),
    (70.0, 75.0, 73.0, [(2.1844, 2.1984, 0.0116), (3.7503, 3.7965, 0.0158), (4.9874, 5.0418, 0.0187)]),
    (70.0, 75.0, 75.0, [(2.5116, 2.5353, 0.0166), (4.1237, 4.1585, 0.0210), (5.3831, 5.4315, 0.0243)]),
];

// The source prints the (60, 61, 64, T=1) estimate with a decimal comma; it is 4.9782.
const TABLE2: [Row; 9] = [
    (55.0, 56.0, 58.0, [(3.0603, 3.0859, 0.0136), (4.3377, 4.3858, 0.0167), (5.3139, 5.3606, 0.0184)]),
    (56.0, 56.0, 58.0, [(3.3988, 3.4029, 0.0113), (4.6770, 4.7357, 0.0143), (5.6544, 5.7237, 0.0161)]),
    (57.0, 56.0, 58.0, [(3.7535, 3.7905, 0.0091), (5.0266, 5.0444, 0.0096), (6.0025, 6.0535, 0.0118)]),
    (60.0, 61.0, 64.0, [(3.5470, 3.5650, 0.0165), (4.9452, 4.9782, 0.0201), (6.0113, 6.0866, 0.0233)]),
    (60.0, 62.0, 64.0, [(3.0547, 3.0800, 0.0156), (4.4610, 4.4886, 0.0190), (5.5376, 5.5609, 0.0210)]),
    (60.0, 63.0, 64.0, [(2.6087, 2.6245, 0.0146), (4.0103, 4.0650, 0.0188), (5.0911, 5.1519, 0.0211)]),
    (79.0, 81.0, 82.0, [(3.8378, 3.8695, 0.0155), (5.6662, 5.7112, 0.0188), (7.0688, 7.1464, 0.0224)]),
    (79.0, 81.0, 85.0, [(4.4841, 4.4995, 0.0227), (6.3405, 6.4147, 0.0282), (7.7554, 7.8190, 0.0308)]),
    (79.0, 81.0, 87.0, [(4.9003, 4.9394, 0.0275), (6.7895, 6.8440, 0.0327), (8.2147, 8.2225, 0.0358)]),
];

fn flatten(rows: &[Row]) -> Vec<PublishedCell> {
    rows.iter()
        .flat_map(|&(s0, k, b, cells)| {
            MATURITIES.into_iter().zip(cells).map(move |(t, (approx, mcv, se))| PublishedCell {
                s0,
                k,
                b,
                t,
                approx,
                mcv,
                se,
            })
        })
        .collect()
}

/// Cells of the strike-above-barrier table in row-major order.
pub fn table1() -> Vec<PublishedCell> {
    flatten(&TABLE1)
}

/// Cells of the strike-below-barrier table in row-major order.
pub fn table2() -> Vec<PublishedCell> {
    flatten(&TABLE2)
}

/// Closed-form `P(τ ≤ T)` for the first passage of `S` to `barrier > spot`.
pub fn hit_probability(spot: f64, barrier: f64, rate: f64, vol: f64, t: f64) -> f64 {
    let mu = (rate - 0.5 * vol * vol) / vol;
    let b = (barrier / spot).ln() / vol;
    let st = t.sqrt();
    phi((-b + mu * t) / st) + (2.0 * mu * b).exp() * phi((-b - mu * t) / st)
}

fn phi(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}
