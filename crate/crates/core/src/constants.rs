//! Physical constants (SI, CODATA 2018) and the fixed prefactor conventions
//! of the response tensors and energy-shift contractions.
//!
//! Conventions, stated once:
//!
//! * Fields are `E = Re[E₀ e e^{i(k·r − ωt)}]`, `B = Re[(E₀/c) b e^{i(k·r − ωt)}]`
//!   with `b = k̂ × e`.
//! * Molecular moments are taken between the ground state `0` and excited
//!   state `n` with real wavefunctions: `⟨n|μ|0⟩ = μ` (real),
//!   `⟨n|m|0⟩ = i·m̄` (purely imaginary), `⟨n|Q|0⟩ = Q` (real, symmetric,
//!   traceless). The quadrupole couples as `−(1/3) Qⱼₖ ∂ₖEⱼ`.
//! * With `Eₙ` the transition energy and `D = Eₙ² − (ħω)²`:
//!   `αᵢⱼ = Σ 2Eₙ μᵢμⱼ / D`, `Gᵢⱼ = i·Ḡᵢⱼ` with `Ḡᵢⱼ = Σ 2ħω μᵢ m̄ⱼ / D`,
//!   `Aᵢⱼₖ = Σ 2Eₙ μᵢ Qⱼₖ / D`.
//! * Cycle-averaged shift: `ΔW = −¼E₀² ⟨α⟩ᵢⱼ ēᵢeⱼ − ½E₀B₀ ⟨G⟩ᵢⱼ ēᵢbⱼ
//!   − ⅙E₀² i⟨A⟩ᵢⱼₖ ēᵢeⱼkₖ`. Each term's complex value is kept; the real part
//!   is the observable and the imaginary part is reported as a residual.

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
pub const REDUCED_PLANCK: f64 = 1.054_571_817e-34;
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
pub const BOHR_MAGNETON: f64 = 9.274_010_078_3e-24;
pub const BOHR_RADIUS: f64 = 5.291_772_109_03e-11;

/// Pinned value; the dimension estimator uses it as an exact construction parameter.
pub const INVERSE_FINE_STRUCTURE: f64 = 137.035_999;
pub const FINE_STRUCTURE: f64 = 1.0 / INVERSE_FINE_STRUCTURE;

/// One electronvolt in joules.
pub const ELECTRONVOLT: f64 = ELEMENTARY_CHARGE;
/// One debye in C·m (10⁻²¹/c exactly).
pub const DEBYE: f64 = 1e-21 / SPEED_OF_LIGHT;
/// Atomic unit of electric quadrupole moment, e·a₀², in C·m².
pub const ATOMIC_QUADRUPOLE: f64 = ELEMENTARY_CHARGE * BOHR_RADIUS * BOHR_RADIUS;

/// Rational prefactors as `(numerator, denominator)` so the exact scalar path
/// uses them without rounding.
pub const ALPHA_SHIFT_FACTOR: (i64, i64) = (-1, 4);
pub const G_SHIFT_FACTOR: (i64, i64) = (-1, 2);
/// `−½` from the two E1–E2 cross terms times the `1/3` quadrupole coupling.
pub const A_SHIFT_FACTOR: (i64, i64) = (-1, 6);

/// Smallest allowed relative detuning `|Eₙ − ħω| / Eₙ`.
pub const DEFAULT_DETUNING_FLOOR: f64 = 0.01;

/// Reference molecular dimension for force-ratio reports, 10 nm.
pub const REFERENCE_DIMENSION: f64 = 10e-9;
