//! Daubechies scaling filters for R = 1..=12 vanishing moments.
//!
//! Coefficients were obtained by spectral factorization of the Daubechies
//! half-band polynomial in 60-digit arithmetic and rounded to f64; the
//! orthonormality residuals of the rounded tables are re-checked in tests.
//! Ordering is the classic one: `h[0]` multiplies φ(2x), so both φ and ψ are
//! supported on [0, 2R−1].

use crate::{Error, Result};

pub const MAX_VANISHING_MOMENTS: usize = 12;

const DB1: [f64; 2] = [
    0.7071067811865475244,
    0.7071067811865475244,
];

const DB2: [f64; 4] = [
    0.48296291314453414337,
    0.83651630373780790558,
    0.22414386804201338103,
    -0.12940952255126038117,
];

const DB3: [f64; 6] = [
    0.332670552950082616,
    0.80689150931109257649,
    0.4598775021184915701,
    -0.1350110200102545887,
    -0.085441273882026661693,
    0.035226291885709536603,
];

const DB4: [f64; 8] = [
    0.23037781330889650086,
    0.71484657055291564709,
    0.63088076792985890788,
    -0.027983769416859854211,
    -0.18703481171909308408,
    0.030841381835560763627,
    0.032883011666885199735,
    -0.010597401785069032105,
];

const DB5: [f64; 10] = [
    0.16010239797419291448,
    0.60382926979718967054,
    0.72430852843777292773,
    0.13842814590132073151,
    -0.24229488706638203186,
    -0.032244869584638374648,
    0.077571493840045713523,
    -0.0062414902127982742742,
    -0.012580751999081999469,
    0.003335725285473771278,
];

const DB6: [f64; 12] = [
    0.11154074335010946362,
    0.49462389039845308568,
    0.75113390802109535068,
    0.31525035170919762909,
    -0.22626469396543982008,
    -0.12976686756726193556,
    0.097501605587323049102,
    0.027522865530305728626,
    -0.031582039317486029565,
    0.00055384220116149613925,
    0.0047772575109455106396,
    -0.0010773010853084795649,
];

const DB7: [f64; 14] = [
    0.07785205408500917902,
    0.39653931948191730654,
    0.72913209084623511992,
    0.46978228740519312247,
    -0.14390600392856497541,
    -0.22403618499387498264,
    0.071309219266830264751,
    0.080612609151083071913,
    -0.03802993693501441358,
    -0.016574541630666880654,
    0.012550998556099840613,
    0.00042957797292136652113,
    -0.0018016407040474909153,
    0.00035371379997452024845,
];

const DB8: [f64; 16] = [
    0.054415842243104009955,
    0.31287159091429997066,
    0.67563073629728980681,
    0.58535468365420671277,
    -0.015829105256349305667,
    -0.28401554296154692652,
    0.00047248457391328277036,
    0.12874742662047845886,
    -0.01736930100180754617,
    -0.044088253930794751507,
    0.013981027917398281649,
    0.0087460940474057767164,
    -0.0048703529934515743104,
    -0.0003917403733769470463,
    0.00067544940645056936637,
    -0.00011747678412476953373,
];

const DB9: [f64; 18] = [
    0.038077947363878346589,
    0.24383467461259035373,
    0.6048231236901111119,
    0.65728807805130053808,
    0.13319738582500757619,
    -0.29327378327917490881,
    -0.096840783222976460514,
    0.14854074933810638014,
    0.030725681479333379212,
    -0.067632829061329973676,
    0.00025094711483145195759,
    0.022361662123679097205,
    -0.0047232047577513972779,
    -0.0042815036824634298345,
    0.0018476468830562264766,
    0.00023038576352319596721,
    -0.00025196318894271013697,
    0.000039347320316271599481,
];

const DB10: [f64; 20] = [
    0.026670057900555553587,
    0.18817680007769148902,
    0.52720118893172558648,
    0.68845903945360356574,
    0.28117234366057746075,
    -0.24984642432731537942,
    -0.1959462743773770435,
    0.12736934033579326008,
    0.09305736460357235116,
    -0.071394147166397087145,
    -0.029457536821875812858,
    0.03321267405934100174,
    0.0036065535669561696554,
    -0.010733175483330575044,
    0.0013953517470529011658,
    0.0019924052951850561172,
    -0.00068585669495971162656,
    -0.00011646685512928545095,
    0.000093588670320069591334,
    -0.000013264202894521244812,
];

const DB11: [f64; 22] = [
    0.018694297761471084025,
    0.1440670211506245128,
    0.44989976435604533477,
    0.68568677491620051112,
    0.41196436894790746293,
    -0.16227524502749036224,
    -0.2742308468179469612,
    0.066043588196683191901,
    0.14981201246637849641,
    -0.046479955116684187272,
    -0.066438785695025205279,
    0.031335090219046076031,
    0.020840904360181063023,
    -0.015364820906201599426,
    -0.0033408588730144456061,
    0.0049284176560590411232,
    -0.00030859285881514316518,
    -0.00089302325066626461339,
    0.00024915252355282349887,
    0.000054439074699368471674,
    -0.000034634984186984995541,
    4.4942742772365100954e-6,
];

const DB12: [f64; 24] = [
    0.013112257957229517507,
    0.10956627282118515461,
    0.37735513521421265709,
    0.6571987225793070893,
    0.51588647842781560876,
    -0.044763885653774626668,
    -0.31617845375278553686,
    -0.023779257256069727684,
    0.18247860592757967985,
    0.0053595696743521503283,
    -0.096432120096507082027,
    0.010849130255822184381,
    0.041546277495084440739,
    -0.01221864906974828072,
    -0.012840825198300683295,
    0.0067114990087955091778,
    0.0022486072409952376,
    -0.0021795036186277604716,
    6.5451282125095955665e-6,
    0.00038865306282093144359,
    -0.000088504109208204324208,
    -0.00002424154575703078403,
    0.000012776952219379766587,
    -1.5290717580685109027e-6,
];

/// Scaling (low-pass) filter for `r` vanishing moments; length `2r`.
pub fn scaling_filter(r: usize) -> Result<&'static [f64]> {
    match r {
        1 => Ok(&DB1),
        2 => Ok(&DB2),
        3 => Ok(&DB3),
        4 => Ok(&DB4),
        5 => Ok(&DB5),
        6 => Ok(&DB6),
        7 => Ok(&DB7),
        8 => Ok(&DB8),
        9 => Ok(&DB9),
        10 => Ok(&DB10),
        11 => Ok(&DB11),
        12 => Ok(&DB12),
        0 => Err(Error::invalid("R", "vanishing moments must be ≥ 1")),
        _ => Err(Error::invalid(
            "R",
            format!("no filter table for R = {r} (max {MAX_VANISHING_MOMENTS})"),
        )),
    }
}

/// Wavelet (high-pass) filter from the quadrature-mirror relation
/// `g[t] = (−1)^t h[2R−1−t]`, chosen so ψ shares the support [0, 2R−1] of φ.
pub fn wavelet_filter(h: &[f64]) -> Vec<f64> {
    let len = h.len();
    (0..len)
        .map(|t| {
            let sign = if t % 2 == 0 { 1.0 } else { -1.0 };
            sign * h[len - 1 - t]
        })
        .collect()
}

/// Hölder smoothness proxy D ≈ ⌊0.18(R−1)⌋: ψ ∈ C^D.
pub fn smoothness(r: usize) -> usize {
    (0.18 * (r as f64 - 1.0)).floor() as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn haar_filter() {
        let h = scaling_filter(1).unwrap();
        assert_relative_eq!(h[0], std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_relative_eq!(h[1], std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
    }

    #[test]
    fn orthonormality_all_tables() {
        for r in 1..=MAX_VANISHING_MOMENTS {
            let h = scaling_filter(r).unwrap();
            assert_eq!(h.len(), 2 * r);
            // ‖h‖ = 1 and shifted-by-2k self-orthogonality.
            for k in 0..r {
                let dot: f64 = (0..h.len() - 2 * k).map(|t| h[t] * h[t + 2 * k]).sum();
                let expect = if k == 0 { 1.0 } else { 0.0 };
                assert!(
                    (dot - expect).abs() <= 1e-12,
                    "R = {r}, shift {k}: dot = {dot}"
                );
            }
            // Low-pass normalization Σ h = √2.
            let s: f64 = h.iter().sum();
            assert_relative_eq!(s, std::f64::consts::SQRT_2, epsilon = 1e-12);
        }
    }

    #[test]
    fn wavelet_filter_vanishing_moments() {
        for r in 1..=6 {
            let g = wavelet_filter(scaling_filter(r).unwrap());
            for p in 0..r {
                let moment: f64 = g.iter().enumerate().map(|(t, &v)| v * (t as f64).powi(p as i32)).sum();
                assert!(moment.abs() <= 1e-8, "R = {r}, moment {p}: {moment}");
            }
        }
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(scaling_filter(0).is_err());
        assert!(scaling_filter(13).is_err());
    }
}
