//! Seeded instance generation for `make-instance`.

use std::collections::BTreeMap;

use ed_slra::structured::{
    catalecticant_instance, hankel_instance, quartic_monomials, random_dense, random_section,
    sylvester_instance, Rat, SectionKind, Structure, WeightKind, WeightMatrix,
};
use ed_slra::structured::Instance;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum FamilyArg {
    Dense,
    Hankel,
    Sylvester,
    Catalecticant,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum WeightArg {
    /// Integers drawn from [1, 20].
    Random,
    Ones,
    Omega,
    Theta,
}

impl WeightArg {
    fn named(self) -> Option<WeightKind> {
        match self {
            WeightArg::Random => None,
            WeightArg::Ones => Some(WeightKind::Ones),
            WeightArg::Omega => Some(WeightKind::Omega),
            WeightArg::Theta => Some(WeightKind::Theta),
        }
    }
}

#[derive(Clone, Debug)]
pub struct InstanceSpec {
    pub family: FamilyArg,
    /// Rows (dense), first degree (Sylvester).
    pub m: Option<usize>,
    /// Columns (dense), order (Hankel), second degree (Sylvester).
    pub n: Option<usize>,
    pub r: Option<usize>,
    pub k: Option<usize>,
    pub weights: WeightArg,
    pub s: usize,
    pub section: SectionKind,
    pub seed: u64,
}

fn ints(rng: &mut ChaCha8Rng, len: usize) -> Vec<Rat> {
    (0..len).map(|_| Rat::int(rng.gen_range(-100..=100))).collect()
}

fn need(v: Option<usize>, name: &str) -> CliResult<usize> {
    v.ok_or_else(|| CliError::Usage(format!("--{name} is required for this family")))
}

/// Builds the instance; the result depends only on `spec`.
pub fn make_instance(spec: &InstanceSpec) -> CliResult<Instance> {
    // Data and sections use separate streams so adding sections keeps U fixed.
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let section_seed = spec.seed ^ 0x5eed_5ec7;
    let mut inst = match spec.family {
        FamilyArg::Dense => {
            let (m, n) = (need(spec.m, "m")?, need(spec.n, "n")?);
            let unit = match spec.weights {
                WeightArg::Random => false,
                WeightArg::Ones => true,
                w => {
                    return Err(CliError::Usage(format!(
                        "dense instances take random or ones weights, not {w:?}"
                    )))
                }
            };
            random_dense(m, n, spec.r.unwrap_or(1), unit, spec.seed)
        }
        FamilyArg::Hankel => {
            let order = need(spec.n, "n")?;
            let data = ints(&mut rng, order);
            let r = spec.r.unwrap_or(1);
            match spec.weights.named() {
                Some(kind) => hankel_instance(&data, r, kind)?,
                None => {
                    let mut inst = hankel_instance(&data, r, WeightKind::Ones)?;
                    let lam: Vec<Rat> = (0..order).map(|_| Rat::int(rng.gen_range(1..=20))).collect();
                    let st = Structure::hankel(order)?;
                    inst.weights = WeightMatrix::new(st.to_matrix(&lam, Rat::one()))?;
                    inst
                }
            }
        }
        FamilyArg::Sylvester => {
            let (m, n) = (need(spec.m, "m")?, need(spec.n, "n")?);
            let k = need(spec.k, "k")?;
            let a = ints(&mut rng, m + 1);
            let b = ints(&mut rng, n + 1);
            let kind = spec.weights.named().ok_or_else(|| {
                CliError::Usage("Sylvester instances take ones, omega or theta weights".into())
            })?;
            sylvester_instance(&a, &b, k, kind)?
        }
        FamilyArg::Catalecticant => {
            if spec.weights != WeightArg::Theta {
                return Err(CliError::Usage("catalecticant instances use theta weights".into()));
            }
            let data: BTreeMap<String, Rat> = quartic_monomials()
                .iter()
                .map(|e| (format!("{}{}{}", e[0], e[1], e[2]), Rat::int(rng.gen_range(-100..=100))))
                .collect();
            catalecticant_instance(&data)?
        }
    };
    if spec.s > 0 {
        if spec.family != FamilyArg::Dense {
            return Err(CliError::Usage("linear sections are generated for dense instances only".into()));
        }
        inst.constraints = random_section(inst.m, inst.n, spec.s, spec.section, section_seed)?;
    }
    inst.validate()?;
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(family: FamilyArg, weights: WeightArg) -> InstanceSpec {
        InstanceSpec {
            family,
            m: Some(4),
            n: Some(4),
            r: None,
            k: None,
            weights,
            s: 0,
            section: SectionKind::Linear,
            seed: 7,
        }
    }

    #[test]
    fn same_seed_same_bytes() {
        let a = make_instance(&spec(FamilyArg::Dense, WeightArg::Random)).unwrap();
        let b = make_instance(&spec(FamilyArg::Dense, WeightArg::Random)).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
    }

    #[test]
    fn dense_ranges() {
        let inst = make_instance(&spec(FamilyArg::Dense, WeightArg::Random)).unwrap();
        for (urow, wrow) in inst.u_f64().iter().zip(inst.weights.to_f64()) {
            assert!(urow.iter().all(|v| (-100.0..=100.0).contains(v) && v.fract() == 0.0));
            assert!(wrow.iter().all(|w| (1.0..=20.0).contains(w) && w.fract() == 0.0));
        }
    }

    #[test]
    fn hankel_omega_is_embedded() {
        let mut s = spec(FamilyArg::Hankel, WeightArg::Omega);
        s.n = Some(6);
        let inst = make_instance(&s).unwrap();
        assert_eq!(inst.weights, ed_slra::structured::hankel_weights(6, WeightKind::Omega).unwrap());
    }

    #[test]
    fn sections_leave_data_alone() {
        let plain = make_instance(&spec(FamilyArg::Dense, WeightArg::Random)).unwrap();
        let mut s = spec(FamilyArg::Dense, WeightArg::Random);
        s.s = 2;
        let cut = make_instance(&s).unwrap();
        assert_eq!(plain.u, cut.u);
        assert_eq!(cut.constraints.len(), 2);
    }
}
