//! Manifest of the reference runs.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Experiment {
    pub id: u32,
    pub name: &'static str,
    pub claim: &'static str,
    pub settings: &'static str,
    pub expected: &'static str,
    pub command: &'static str,
}

const MANIFEST: [Experiment; 10] = [
    Experiment {
        id: 1,
        name: "theta-zeros",
        claim: "the alternating theta series vanishes on Z + 1/2",
        settings: "a=pi, scale=1, k in [-5,5], sup on [-3,3]",
        expected: "max |g(k+1/2)| <= 1e-10 sup",
        command: "theta",
    },
    Experiment {
        id: 2,
        name: "lift-identity",
        claim: "lifted series equal their closed form exp(a((pz+qw)/sigma)^2 - az^2 - aw^2) g((pz+qw)/sigma^2)",
        settings: "(p,q)=(1,2), a=1, 20 random coefficient draws on [-10,10], 41x41 grid on [-3,3]^2",
        expected: "max discrepancy <= 1e-8",
        command: "annihilator",
    },
    Experiment {
        id: 3,
        name: "product-annihilator",
        claim: "a separated set with counting slope below 1 is the zero set of a nonzero function of the space",
        settings: "Gamma=2Z+0.3, a=1, eps=0.25, k in [-12,12]",
        expected: "residual <= 1e-8 sup on [-8,8], sup >= 0.1 max|c_k|, decay slope near -a/(1-eps)",
        command: "annihilator",
    },
    Experiment {
        id: 4,
        name: "integers-vs-punctured",
        claim: "Z is a sampling set for a=pi while Z minus {0} is not",
        settings: "a=pi, N in {10,20,40}, margin 5",
        expected: "A_est(Z) within 2x; A_est(Z\\{0}) strictly decreasing with A(40) <= A(10)/2",
        command: "frame-trend",
    },
    Experiment {
        id: 5,
        name: "slanted-lattice",
        claim: "slanted products of dense progressions sample; sparse ones do not",
        settings: "(p,q)=(1,1), Gamma_j=0.9Z and 1.2Z, a=pi, N in {10,20,40}",
        expected: "0.9Z stable within 2x; 1.2Z decays by 10x or more",
        command: "frame-trend",
    },
    Experiment {
        id: 6,
        name: "critical-counterexample",
        claim: "the lifted alternating theta series vanishes on the critical configuration",
        settings: "(p,q)=(1,1), a=pi, Gamma_1'=0.7Z, 200 points",
        expected: "residual <= 1e-8 sup; |f2| >= 0.1 sup somewhere",
        command: "annihilator",
    },
    Experiment {
        id: 7,
        name: "trajectory-dichotomy",
        claim: "irrational slopes sample with any positive density; rational slopes need density above 1/sigma",
        settings: "golden slope with 4Z; slope (1,1) with 4Z and 0.6Z; a=pi; windows {10,20,40}",
        expected: "golden/4Z stable; (1,1)/4Z decays by 10x or more; (1,1)/0.6Z stable",
        command: "trajectory-trend",
    },
    Experiment {
        id: 8,
        name: "trajectory-annihilator",
        claim: "a rational family with upper density below 1/sigma carries a nonzero function vanishing on it",
        settings: "(p,q)=(1,1), Gamma=2Z, a=1",
        expected: "max |f| on the lines <= 1e-6 sup",
        command: "trajectory-annihilate",
    },
    Experiment {
        id: 9,
        name: "gabor-trends",
        claim: "Gaussian Gabor systems on the rational lattices are frames when c<1, d<1 or c<sigma^2, d<sigma^-2",
        settings: "(1,1) c=d=0.9; (1,2) c=4 d=0.2; (1,1) c=d=1.2; translate step 0.1",
        expected: "first two stable within 2x for N in {10,20}; c=d=1.2 decays by 10x from N=10 to 40",
        command: "gabor-trend",
    },
    Experiment {
        id: 10,
        name: "quadrature-and-norms",
        claim: "line integrals match closed forms; ||f||_p and ||c||_p are equivalent",
        settings: "single atoms on x=0 and x=1; 50 random unit coefficient draws",
        expected: "1e-6 relative agreement; ratio spread < 10",
        command: "trajectory-trend",
    },
];

pub fn list_experiments() -> &'static [Experiment] {
    &MANIFEST
}

pub fn manifest_text() -> String {
    let mut s = String::new();
    for e in list_experiments() {
        s.push_str(&format!(
            "[{}] {}\n  claim: {}\n  settings: {}\n  expected: {}\n  command: {}\n",
            e.id, e.name, e.claim, e.settings, e.expected, e.command
        ));
    }
    s
}
