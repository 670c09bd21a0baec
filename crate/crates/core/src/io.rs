//! JSON input schemas, deterministic JSON and CSV output.
//!
//! Every file carries `"schema": 1`. Parse errors name the file, line and
//! column. Output floats are written with 17 significant digits so repeated
//! runs produce byte-identical files.

use std::io::Write;
use std::path::Path;

use num_complex::Complex;
use num_rational::BigRational;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::constants::{ATOMIC_QUADRUPOLE, BOHR_MAGNETON, DEBYE, ELECTRONVOLT};
use crate::error::{Error, Result};
use crate::force::ForceResult;
use crate::molecule::{ExcitedState, MolecularModel};
use crate::radiation::{amplitude_from_intensity, BeamMode, BeamProfile, Frame, Handedness};
use crate::scalar::Scalar;
use crate::tensor::Tensor;

pub const SCHEMA_VERSION: u32 = 1;

fn check_schema(origin: &str, schema: u32) -> Result<()> {
    if schema != SCHEMA_VERSION {
        return Err(Error::Parse(format!(
            "{origin}: unsupported schema {schema}, expected {SCHEMA_VERSION}"
        )));
    }
    Ok(())
}

/// Parses `text`, reporting failures as `origin:line:column: message`.
pub fn parse_json<T: DeserializeOwned>(origin: &str, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("{origin}:{}:{}: {e}", e.line(), e.column())))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: cannot read: {e}", path.display())))?;
    parse_json(&path.display().to_string(), &text)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    #[serde(rename = "energy_eV")]
    pub energy_ev: f64,
    #[serde(rename = "mu_D")]
    pub mu_d: [f64; 3],
    pub m_bar_bohr_magnetons: [f64; 3],
    #[serde(rename = "Q_au")]
    pub q_au: [[f64; 3]; 3],
}

/// Molecular model: energies in eV, dipoles in debye, magnetic moments in
/// Bohr magnetons, quadrupoles in atomic units (e·a₀²).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub schema: u32,
    pub label: String,
    #[serde(rename = "ground_energy_eV")]
    pub ground_energy_ev: f64,
    pub states: Vec<StateFile>,
}

impl ModelFile {
    /// SI model. Exact scalars take every input and conversion constant as
    /// the exact decimal it is written as.
    pub fn to_model<S: Scalar>(&self, origin: &str, tol: f64) -> Result<MolecularModel<S>> {
        check_schema(origin, self.schema)?;
        let conv = |x: f64, unit: f64| S::from_decimal_f64(x) * S::from_decimal_f64(unit);
        let vec3 = |v: &[f64; 3], unit: f64| v.map(|x| conv(x, unit));
        let states = self
            .states
            .iter()
            .map(|s| ExcitedState {
                energy: conv(s.energy_ev, ELECTRONVOLT),
                mu: vec3(&s.mu_d, DEBYE),
                m_bar: vec3(&s.m_bar_bohr_magnetons, BOHR_MAGNETON),
                quadrupole: s.q_au.map(|row| row.map(|x| conv(x, ATOMIC_QUADRUPOLE))),
            })
            .collect();
        MolecularModel::new(self.label.clone(), conv(self.ground_energy_ev, ELECTRONVOLT), states, tol)
            .map_err(|e| Error::InvalidModel(format!("{origin}: {e}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HandednessTag {
    L,
    R,
    #[serde(rename = "linear")]
    Linear,
}

/// A single beam mode. `intensity_W_m2` is the local intensity used by
/// `energy`; forces take intensities from the profile instead.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamFile {
    pub schema: u32,
    pub wavelength_nm: f64,
    pub handedness: HandednessTag,
    #[serde(default)]
    pub linear_angle_rad: Option<f64>,
    #[serde(default = "default_axis")]
    pub axis: [f64; 3],
    #[serde(rename = "intensity_W_m2", default)]
    pub intensity_w_m2: Option<f64>,
}

fn default_axis() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

impl BeamFile {
    pub fn handedness(&self, origin: &str) -> Result<Handedness> {
        match (self.handedness, self.linear_angle_rad) {
            (HandednessTag::L, None) => Ok(Handedness::Left),
            (HandednessTag::R, None) => Ok(Handedness::Right),
            (HandednessTag::Linear, angle) => Ok(Handedness::Linear { angle: angle.unwrap_or(0.0) }),
            (_, Some(_)) => Err(Error::Parse(format!(
                "{origin}: linear_angle_rad only applies to linear polarization"
            ))),
        }
    }

    pub fn to_beam(&self, origin: &str) -> Result<BeamMode<f64>> {
        check_schema(origin, self.schema)?;
        let handedness = self.handedness(origin)?;
        let frame = Frame::from_axis(self.axis)?;
        let amplitude = self.intensity_w_m2.map(amplitude_from_intensity).unwrap_or(1.0);
        BeamMode::with_handedness(handedness, &frame, self.wavelength_nm * 1e-9, amplitude)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKindTag {
    Gaussian,
    PlaneWave,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileFile {
    pub schema: u32,
    pub kind: ProfileKindTag,
    #[serde(default)]
    pub waist_um: Option<f64>,
    #[serde(rename = "power_W", default)]
    pub power_w: Option<f64>,
    #[serde(rename = "intensity_W_m2", default)]
    pub intensity_w_m2: Option<f64>,
    #[serde(default)]
    pub focus_um: Option<[f64; 3]>,
}

impl ProfileFile {
    /// Profile aligned with `axis`, normally the beam's propagation direction.
    pub fn to_profile(&self, origin: &str, axis: [f64; 3]) -> Result<BeamProfile<f64>> {
        check_schema(origin, self.schema)?;
        let missing = |field: &str| Error::Parse(format!("{origin}: {field} is required for this profile kind"));
        match self.kind {
            ProfileKindTag::Gaussian => {
                let waist = self.waist_um.ok_or_else(|| missing("waist_um"))?;
                let power = self.power_w.ok_or_else(|| missing("power_W"))?;
                let focus = self.focus_um.unwrap_or([0.0; 3]).map(|x| x * 1e-6);
                BeamProfile::gaussian(waist * 1e-6, power, axis, focus)
            }
            ProfileKindTag::PlaneWave => {
                let intensity = self.intensity_w_m2.ok_or_else(|| missing("intensity_W_m2"))?;
                BeamProfile::plane_wave(intensity, axis)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PositionsFile {
    pub schema: u32,
    pub positions_um: Vec<[f64; 3]>,
}

impl PositionsFile {
    pub fn to_positions(&self, origin: &str) -> Result<Vec<[f64; 3]>> {
        check_schema(origin, self.schema)?;
        Ok(self.positions_um.iter().map(|p| p.map(|x| x * 1e-6)).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorFile {
    pub schema: u32,
    pub rank: usize,
    /// Row-major `[re, im]` pairs, last index fastest.
    pub components: Vec<[f64; 2]>,
    #[serde(default)]
    pub unit_tag: String,
}

impl TensorFile {
    pub fn to_tensor<S: Scalar>(&self, origin: &str) -> Result<Tensor<S>> {
        check_schema(origin, self.schema)?;
        let components = self
            .components
            .iter()
            .map(|[re, im]| Complex::new(S::from_decimal_f64(*re), S::from_decimal_f64(*im)))
            .collect();
        let mut t = Tensor::from_components(self.rank, components)
            .map_err(|e| Error::Parse(format!("{origin}: {e}")))?;
        t.unit_tag = self.unit_tag.clone();
        Ok(t)
    }

    pub fn from_tensor(t: &Tensor<f64>) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            rank: t.rank(),
            components: complex_pairs(t.components()),
            unit_tag: t.unit_tag.clone(),
        }
    }
}

pub fn complex_pairs(values: &[Complex<f64>]) -> Vec<[f64; 2]> {
    values.iter().map(|c| [c.re, c.im]).collect()
}

/// Exact rationals as `"p/q"` strings.
pub fn rational_pairs(values: &[Complex<BigRational>]) -> Vec<[String; 2]> {
    values.iter().map(|c| [c.re.to_string(), c.im.to_string()]).collect()
}

/// Formats every float in scientific notation with 17 significant digits.
#[derive(Clone, Debug, Default)]
pub struct FixedFloatFormatter {
    inner: serde_json::ser::PrettyFormatter<'static>,
}

macro_rules! delegate {
    ($($name:ident($($arg:ident: $ty:ty),*)),* $(,)?) => {
        $(fn $name<W: ?Sized + Write>(&mut self, writer: &mut W $(, $arg: $ty)*) -> std::io::Result<()> {
            self.inner.$name(writer $(, $arg)*)
        })*
    };
}

impl serde_json::ser::Formatter for FixedFloatFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        write!(writer, "{}", format_f64(value))
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    delegate!(
        begin_array(),
        end_array(),
        begin_array_value(first: bool),
        end_array_value(),
        begin_object(),
        end_object(),
        begin_object_key(first: bool),
        begin_object_value(),
        end_object_value(),
    );
}

/// Signed zero prints as `0`, so sign conventions never show up as `-0`.
pub fn format_f64(value: f64) -> String {
    let value = if value == 0.0 { 0.0 } else { value };
    format!("{value:.16e}")
}

/// Pretty JSON with fixed float formatting and a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedFloatFormatter::default());
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Parse(format!("serialization failed: {e}")))?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("serde_json writes UTF-8"))
}

pub const FORCE_CSV_HEADER: &str =
    "x_m,y_m,z_m,intensity_W_m2,F_x_N,F_y_N,F_z_N,Fw_x_N,Fw_y_N,Fw_z_N,Fh_x_N,Fh_y_N,Fh_z_N,Fq_x_N,Fq_y_N,Fq_z_N";

pub fn forces_to_csv(results: &[ForceResult<f64>]) -> String {
    let mut out = String::from(FORCE_CSV_HEADER);
    out.push('\n');
    for r in results {
        let d = &r.decomposition;
        let fields: Vec<String> = r
            .position
            .iter()
            .chain([r.intensity].iter())
            .chain(&r.force)
            .chain(&d.grad_w)
            .chain(&d.grad_h)
            .chain(&d.quadrupole)
            .map(|v| format_f64(*v))
            .collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_seventeen_digits() {
        let s = to_json_string(&serde_json::json!({"x": 0.1, "n": 3})).unwrap();
        assert!(s.contains("1.0000000000000001e-1"), "{s}");
        assert!(s.contains("\"n\": 3"));
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["x"].as_f64(), Some(0.1));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = "{\n  \"schema\": 1,\n  \"label\": oops\n}";
        match parse_json::<ModelFile>("model.json", text) {
            Err(Error::Parse(msg)) => assert!(msg.starts_with("model.json:3:"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn schema_version_checked() {
        let m = ModelFile { schema: 2, label: "x".into(), ground_energy_ev: 0.0, states: vec![] };
        assert!(m.to_model::<f64>("m", 1e-12).is_err());
    }

    #[test]
    fn beam_file_round_trip() {
        let text = r#"{"schema": 1, "wavelength_nm": 1064, "handedness": "R", "intensity_W_m2": 1e9}"#;
        let b: BeamFile = parse_json("beam", text).unwrap();
        let beam = b.to_beam("beam").unwrap();
        assert_eq!(beam.handedness, Handedness::Right);
        let bad = r#"{"schema": 1, "wavelength_nm": 1064, "handedness": "L", "linear_angle_rad": 0.3}"#;
        assert!(parse_json::<BeamFile>("beam", bad).unwrap().to_beam("beam").is_err());
    }

    #[test]
    fn csv_rows() {
        let csv = forces_to_csv(&[]);
        assert_eq!(csv.lines().count(), 1);
        assert_eq!(FORCE_CSV_HEADER.split(',').count(), 16);
    }
}
