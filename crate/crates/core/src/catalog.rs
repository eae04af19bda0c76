//! Bundled example inputs.

pub const HEISENBERG_R3: &str = include_str!("../catalog/heisenberg_r3.fol");
pub const NONPOISSON_R4: &str = include_str!("../catalog/nonpoisson_r4.fol");
pub const CONTACT_R3: &str = include_str!("../catalog/contact_r3.fol");
pub const KER_DZ_R3: &str = include_str!("../catalog/ker_dz_r3.fol");
pub const BIVECTORS: &str = include_str!("../catalog/bivectors.fol");
pub const R5_FLAT: &str = include_str!("../catalog/r5_flat.scn");
pub const S2XR: &str = include_str!("../catalog/s2xr.scn");
pub const S3_MINUS_POINT: &str = include_str!("../catalog/s3_minus_point.scn");
pub const CP5_BOTT: &str = include_str!("../catalog/cp5_bott.toml");

/// `(file name, contents)` for every bundled file.
pub const ALL: &[(&str, &str)] = &[
    ("heisenberg_r3.fol", HEISENBERG_R3),
    ("nonpoisson_r4.fol", NONPOISSON_R4),
    ("contact_r3.fol", CONTACT_R3),
    ("ker_dz_r3.fol", KER_DZ_R3),
    ("bivectors.fol", BIVECTORS),
    ("r5_flat.scn", R5_FLAT),
    ("s2xr.scn", S2XR),
    ("s3_minus_point.scn", S3_MINUS_POINT),
    ("cp5_bott.toml", CP5_BOTT),
];

pub fn get(name: &str) -> Option<&'static str> {
    ALL.iter().find(|(n, _)| *n == name).map(|(_, c)| *c)
}
