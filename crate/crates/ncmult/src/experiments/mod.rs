//! The experiment catalog: one entry per acceptance suite.

use ncmult_core::matkernel::{random_psd, CMatrix};
use ncmult_core::rng::{self, below, uniform_range, Rng};
use ncmult_core::Exponent;

use crate::config::{Kind, Param, Params};
use crate::output::Outcome;

mod algebra;
mod circle;
mod inequalities;
mod kakeya;
mod schur;

pub type RunFn = fn(&Params, u64) -> Result<Outcome, String>;

#[derive(Debug)]
pub struct Experiment {
    pub name: &'static str,
    /// The result the suite exercises.
    pub tag: &'static str,
    /// Acceptance criterion number.
    pub criterion: usize,
    /// Failing checks never change the exit status.
    pub exploratory: bool,
    pub schema: &'static [Param],
    pub outputs: &'static [&'static str],
    pub run: RunFn,
}

pub fn catalog() -> &'static [Experiment] {
    CATALOG
}

pub fn find(name: &str) -> Option<&'static Experiment> {
    CATALOG.iter().find(|e| e.name == name)
}

const fn p(key: &'static str, kind: Kind, default: &'static str, help: &'static str) -> Param {
    crate::config::param(key, kind, default, help)
}

static CATALOG: &[Experiment] = &[
    Experiment {
        name: "theoremB-suite",
        tag: "almost multiplicativity of subunital trace-nonincreasing positive maps",
        criterion: 1,
        exploratory: false,
        schema: &[
            p("instances", Kind::Int, "500", "instances per (n, p)"),
            p("dims", Kind::IntList, "2,4,8", "matrix sizes"),
            p("exps", Kind::ExpList, "1,2,4", "exponents p"),
            p("max_kraus", Kind::Int, "3", "largest Kraus rank"),
        ],
        outputs: &["theoremB: seed,instance,n,p,theta,lhs,rhs,slack,twist,pass"],
        run: inequalities::theorem_b,
    },
    Experiment {
        name: "lemma11-quadrature",
        tag: "sech-weighted integral formula for the geometric mean and its Lp inequalities",
        criterion: 2,
        exploratory: false,
        schema: &[
            p("instances", Kind::Int, "100", "random instances"),
            p("n", Kind::Int, "4", "matrix size"),
            p("s_max", Kind::Float, "8", "quadrature half-width"),
            p("h", Kind::Float, "1e-3", "quadrature step"),
            p("exps", Kind::ExpList, "1,2,4,inf", "exponents for the inequalities"),
        ],
        outputs: &[
            "quadrature: seed,instance,n,error,pass",
            "lemma11: seed,instance,n,p,part,lhs,rhs,slack,pass",
        ],
        run: inequalities::lemma11,
    },
    Experiment {
        name: "powers-stormer",
        tag: "Powers-Stormer inequality for fractional powers",
        criterion: 3,
        exploratory: false,
        schema: &[
            p("instances", Kind::Int, "500", "pairs per theta"),
            p("thetas", Kind::FloatList, "0.25,0.5,0.75,1", "fractional powers"),
            p("exps", Kind::ExpList, "1,2,4,8,inf", "exponents; pairs with theta*p < 1 are skipped"),
            p("dims", Kind::IntList, "2,3,4", "matrix sizes drawn uniformly"),
        ],
        outputs: &["powers_stormer: seed,instance,n,p,theta,lhs,rhs,slack,pass"],
        run: inequalities::powers_stormer,
    },
    Experiment {
        name: "corollaries",
        tag: "fractional-power almost multiplicativity with constants (3+sqrt2)/2 and 3+sqrt2",
        criterion: 4,
        exploratory: false,
        schema: &[
            p("instances", Kind::Int, "300", "instances per (n, theta)"),
            p("dims", Kind::IntList, "2,4,6", "matrix sizes"),
            p("thetas", Kind::FloatList, "0.25,0.5,0.75,1", "fractional powers"),
        ],
        outputs: &[
            "corollaries: suite,seed,instance,n,p,theta,lhs,rhs,slack,twist,pass",
            "corollary_summary: suite,constant,instances,max_ratio,min_slack",
        ],
        run: inequalities::corollaries,
    },
    Experiment {
        name: "plancherel",
        tag: "Plancherel trace and traciality on finite group von Neumann algebras",
        criterion: 5,
        exploratory: false,
        schema: &[p("max_order", Kind::Int, "64", "largest group order")],
        outputs: &["plancherel: group,order,axioms,plancherel_err,trace_err,pass"],
        run: algebra::plancherel,
    },
    Experiment {
        name: "restriction",
        tag: "de Leeuw restriction: multiplier norms do not grow on subgroups",
        criterion: 6,
        exploratory: false,
        schema: &[
            p("symbols", Kind::Int, "50", "random symbols per pair"),
            p("exps", Kind::ExpList, "1,2,4,inf", "exponents"),
            p("restarts", Kind::Int, "2", "ascent restarts"),
            p("iterations", Kind::Int, "40", "ascent iterations"),
        ],
        outputs: &["restriction: pair,symbol,p,est_h,est_g,ratio,pass"],
        run: algebra::restriction,
    },
    Experiment {
        name: "lattice-approx",
        tag: "lattice approximation of circle multipliers by discretised operators S_j",
        criterion: 7,
        exploratory: false,
        schema: &[
            p("cutoff", Kind::Int, "32", "frequency cutoff K of the test element"),
            p("guard", Kind::Int, "128", "guard band"),
            p("levels", Kind::IntList, "4,5,6,7,8,9,10", "levels j"),
            p("ramp", Kind::Float, "0.05", "ramp width of the smoothed indicator"),
        ],
        outputs: &["lattice: symbol,j,defect,relative_defect,tail,pass"],
        run: circle::lattice_approx,
    },
    Experiment {
        name: "restriction-machinery",
        tag: "restriction maps: window isometry and commutation defect with multipliers",
        criterion: 8,
        exploratory: false,
        schema: &[
            p("trials", Kind::Int, "10", "random elements per finite configuration"),
            p("levels", Kind::IntList, "4,5,6,7,8,9", "circle levels j"),
            p("q", Kind::Float, "4", "exponent of the commutation defect"),
        ],
        outputs: &[
            "isometry: setting,trial,isometry_residual,claim_a_gap,claim_b_defect,pass",
            "claim_b: symbol,j,claim_b_defect,isometry_residual,pass",
        ],
        run: circle::restriction_machinery,
    },
    Experiment {
        name: "periodization",
        tag: "periodization of quotient symbols and the quotient norm bound",
        criterion: 9,
        exploratory: false,
        schema: &[
            p("group", Kind::Text, "dihedral4,heisenberg3", "groups; the subgroup is the center"),
            p("symbols", Kind::Int, "10", "random quotient symbols per group"),
            p("exps", Kind::ExpList, "1,4,inf", "exponents"),
            p("restarts", Kind::Int, "2", "ascent restarts"),
            p("iterations", Kind::Int, "40", "ascent iterations"),
        ],
        outputs: &["periodization: group,symbol,p,projection,central,intertwine,quotient,lifted,ratio,pass"],
        run: algebra::periodization,
    },
    Experiment {
        name: "window-isometry",
        tag: "isometry of translated windows on the circle",
        criterion: 10,
        exploratory: false,
        schema: &[
            p("configs", Kind::Int, "100", "random configurations"),
            p("max_points", Kind::Int, "12", "largest number of translates"),
        ],
        outputs: &["window: config,points,den,width_num,residual,pass"],
        run: circle::window_isometry,
    },
    Experiment {
        name: "fell-absorption",
        tag: "Fell absorption for the left regular representation",
        criterion: 11,
        exploratory: false,
        schema: &[
            p("orders", Kind::IntList, "3,4,6,8", "cyclic group orders"),
            p("k", Kind::Int, "2", "coefficient matrix size"),
            p("trials", Kind::Int, "5", "random coefficient sets per group"),
        ],
        outputs: &["fell: n,trial,p2_lhs,p2_rhs,pinf_lhs,pinf_rhs,p2_err,pinf_err,pass"],
        run: algebra::fell,
    },
    Experiment {
        name: "schur-suite",
        tag: "Schur multiplier cb norms by factorization and finite-section suprema",
        criterion: 12,
        exploratory: false,
        schema: &[
            p("ones_sizes", Kind::IntList, "2,5,10", "all-ones sizes"),
            p("rank_one", Kind::Int, "10", "random rank-one symbols"),
            p("rank_one_size", Kind::Int, "6", "size of the rank-one symbols"),
            p("p", Kind::Float, "4", "exponent of the section sweeps"),
            p("restarts", Kind::Int, "2", "ascent restarts"),
            p("iterations", Kind::Int, "40", "ascent iterations"),
        ],
        outputs: &[
            "cb: case,size,value,expected,lower,residual,pass",
            "sections: sweep,p,size,value,converged,pass",
        ],
        run: schur::schur_suite,
    },
    Experiment {
        name: "transference",
        tag: "Fourier-Schur transference on finite cyclic groups",
        criterion: 13,
        exploratory: false,
        schema: &[
            p("orders", Kind::IntList, "4,8,16", "cyclic group orders"),
            p("symbols", Kind::Int, "30", "random real symbols per order"),
        ],
        outputs: &["transference: n,symbol,p,fourier,schur,rel_err,pass"],
        run: schur::transference,
    },
    Experiment {
        name: "threshold-folner",
        tag: "superlevel thresholds for almost invariant step functions and SAIN witnesses",
        criterion: 14,
        exploratory: false,
        schema: &[
            p("instances", Kind::Int, "200", "random step-function instances"),
            p("cells", Kind::Int, "20", "cells per instance"),
            p("shifts", Kind::Int, "3", "perturbed copies per instance"),
            p("js", Kind::IntList, "2,4,8", "indices j"),
            p("action_cells", Kind::Int, "128", "cells of the permutation action"),
            p("radius", Kind::Int, "3", "window radius"),
        ],
        outputs: &[
            "threshold: instance,eps,t,oracle_admissible,valid,pass",
            "sain: action,j,folner_size,level,sain_sum,bound,pass",
        ],
        run: circle::threshold_folner,
    },
    Experiment {
        name: "kakeya-geometry",
        tag: "Kakeya-type idempotent multipliers: Dirichlet pairs, helices and Besicovitch families",
        criterion: 15,
        exploratory: false,
        schema: &[
            p("q_min", Kind::Int, "10000", "Dirichlet pairs are generated past this denominator"),
            p("transport_pairs", Kind::Int, "5", "pairs used for the transport bound"),
            p("polygon_length", Kind::Float, "200", "helix length for the truncated polygon"),
            p("disc_radius", Kind::Float, "0.25", "radius of the disc region"),
            p("directions", Kind::Int, "128", "Besicovitch directions on a quarter circle"),
            p("target", Kind::Float, "3", "required area ratio"),
        ],
        outputs: &[
            "dirichlet: beta,p,q,exact",
            "transport: beta,p,q,alpha_max,alpha_max_q,mismatches,crt,pass",
            "polygon: beta,length,vertices,area,hausdorff,pass",
            "besicovitch: stage,directions,ratio,area_error,pass",
        ],
        run: kakeya::geometry,
    },
    Experiment {
        name: "kakeya-growth",
        tag: "growth of disc and polygon idempotent multiplier norms on grids",
        criterion: 16,
        exploratory: true,
        schema: &[
            p("sizes", Kind::IntList, "16,32,64", "grid sizes N"),
            p("p", Kind::Float, "4", "exponent"),
            p("radius", Kind::Float, "0.3", "disc and octagon radius"),
            p("restarts", Kind::Int, "2", "ascent restarts"),
            p("iterations", Kind::Int, "30", "ascent iterations"),
        ],
        outputs: &["growth: N,p,region,lower_bound,converged"],
        run: kakeya::growth,
    },
    Experiment {
        name: "jodeit",
        tag: "Jodeit extension of lattice multipliers to the circle",
        criterion: 17,
        exploratory: false,
        schema: &[
            p("symbols", Kind::Int, "50", "random symbols"),
            p("max_order", Kind::Int, "20", "largest cyclic order"),
            p("oversample", Kind::Int, "64", "grid points per lattice cell for the sup"),
        ],
        outputs: &["jodeit: symbol,n,restriction_err,sup_ext,max_m,norm_ext,norm_m,pass"],
        run: circle::jodeit,
    },
];

/// Independent stream for instance `idx` of suite `suite`.
pub(crate) fn instance_rng(seed: u64, suite: u64, idx: u64) -> Rng {
    rng::stream(seed, (suite << 40) | idx)
}

/// Maps `f` over `items`, preserving order. Each item must carry its own
/// randomness so results do not depend on scheduling.
pub(crate) fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Positive semidefinite matrix of random rank and scale.
pub(crate) fn random_state(r: &mut Rng, n: usize) -> CMatrix {
    let rank = 1 + below(r, n);
    random_psd(r, n, rank).scale_real(uniform_range(r, 0.1, 3.0))
}

pub(crate) fn exp_label(p: Exponent) -> String {
    match p {
        Exponent::Infinity => "inf".to_string(),
        Exponent::Finite(v) => format!("{v}"),
    }
}

pub(crate) fn core_err(e: ncmult_core::Error) -> String {
    e.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_is_complete() {
        let cat = catalog();
        assert_eq!(cat.len(), 17);
        for (i, e) in cat.iter().enumerate() {
            assert_eq!(e.criterion, i + 1);
            assert!(!e.tag.is_empty());
            assert!(!e.outputs.is_empty());
            assert!(e.schema.iter().all(|p| p.key != "seed"));
            // Defaults must parse.
            Params::resolve(e.schema, &[]).unwrap();
        }
        assert!(find("theoremB-suite").is_some());
        assert!(find("kakeya-growth").unwrap().exploratory);
        assert!(find("nope").is_none());
        let mut names: Vec<&str> = cat.iter().map(|e| e.name).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), 17);
    }
}
