//! Built-in manifold documents: two frames of the Kodaira–Thurston
//! surface, the Iwasawa manifold and the Nakamura family.

use std::collections::BTreeMap;

use crate::model::{instantiate, parse_spec, ComplexInstance, ManifoldSpec};
use crate::scalar::GaussianRational as Q;
use crate::Error;

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub document: &'static str,
    /// Expected results, one claim per line.
    pub provenance: &'static [&'static str],
    /// Parameter names with their default values as written in the document.
    pub parameters: &'static [(&'static str, &'static str)],
}

const KODAIRA_THURSTON: &str = "\
# Kodaira-Thurston surface, unitary coframe phi.
[manifold]
name = kodaira-thurston
n = 2
generators_10 = phi1, phi2
generators_01 = phib1, phib2

[dbar]
phi2 = (-1/2*i) * phi1^phib1

[del]
phib2 = (-1/2*i) * phi1^phib1

[omega]
1/2 * phi1^phib2 - 1/2 * phi2^phib1

# canonical admissible metric for this omega
[metric]
weights = 2, 2

[conjugation]
phib1 = 1 * phi1
phib2 = 1 * phi2
";

const KODAIRA_THURSTON_XI: &str = "\
# Kodaira-Thurston surface in the frame xi1 = phi1 + i phi2, xi2 = phi1 - i phi2.
[manifold]
name = kodaira-thurston-xi
n = 2
generators_10 = xi1, xi2
generators_01 = eta1, eta2

[dbar]
xi1 = 1/8 * (xi1 + xi2)^(eta1 + eta2)
xi2 = -1/8 * (xi1 + xi2)^(eta1 + eta2)

[del]
eta1 = -1/8 * (xi1 + xi2)^(eta1 + eta2)
eta2 = 1/8 * (xi1 + xi2)^(eta1 + eta2)

[omega]
(1/4*i) * xi1^eta1 - (1/4*i) * xi2^eta2

[metric]
weights = 4, 4

[conjugation]
eta1 = 1 * xi1
eta2 = 1 * xi2
";

const IWASAWA: &str = "\
# Iwasawa manifold, left-invariant coframe psi.
[manifold]
name = iwasawa
n = 3
generators_10 = psi1, psi2, psi3
generators_01 = psib1, psib2, psib3

[dbar]
psi3 = -psib1^psi2

[del]
psib3 = -psi1^psib2

[omega]
i * psi2^psib2 + psi1^psib3 - psi3^psib1

[metric]
weights = 1, 1, 1

[conjugation]
psib1 = 1 * psi1
psib2 = 1 * psi2
psib3 = 1 * psi3
";

const NAKAMURA: &str = "\
# Nakamura manifold, deformed coframe Phi(t); t = 0 is the undeformed structure.
# The conjugates in this frame carry non-constant factors, so neither the
# del rules nor the conjugation can be given.
[manifold]
name = nakamura
n = 3
generators_10 = Phi1, Phi2, Phi3
generators_01 = Phib1, Phib2, Phib3

[parameters]
t = 0

[dbar]
Phi3 = (2*t) * Phi1^Phib2

[omega]
(1/2*i) * Phi1^Phib1 + 1/2 * Phib2^Phi3 + 1/2 * Phi2^Phib3

# canonical admissible metric for this omega
[metric]
weights = 2, 2, 2
";

const ENTRIES: [CatalogEntry; 4] = [
    CatalogEntry {
        name: "kodaira-thurston",
        document: KODAIRA_THURSTON,
        provenance: &[
            "Bott-Chern dimensions 1,1,2,1,3,1,1,2,1 in bidegree order (0,0),(1,0),(0,1),(2,0),(1,1),(0,2),(2,1),(1,2),(2,2)",
            "H_BC^{1,1} spanned by phib1^phi2, phi1^phib2, phi1^phib1",
            "H_dbar^{1,0} = <phi1>, H_dbar^{1,1} = <phi1^phib2, phi2^phib1>",
            "dbar dbar^Lambda-lemma fails",
            "phi1^phi2 and phib2 are BC-harmonic, their wedge is not",
        ],
        parameters: &[],
    },
    CatalogEntry {
        name: "kodaira-thurston-xi",
        document: KODAIRA_THURSTON_XI,
        provenance: &[
            "image of kodaira-thurston under xi1 = phi1 + i phi2, xi2 = phi1 - i phi2",
            "omega = (i/4)(xi1^eta1 - xi2^eta2), canonical weights 4, 4",
            "same cohomology tables and verdicts as kodaira-thurston",
        ],
        parameters: &[],
    },
    CatalogEntry {
        name: "iwasawa",
        document: IWASAWA,
        provenance: &[
            "[psib1] is nonzero in H_dbar^{0,1}",
            "omega^2 ^ psib1 is dbar-exact, so hard Lefschetz fails at k = 2",
            "dbar dbar^Lambda-lemma fails",
        ],
        parameters: &[],
    },
    CatalogEntry {
        name: "nakamura",
        document: NAKAMURA,
        provenance: &[
            "t = 0: dbar vanishes, h^{p,q} = C(3,p) C(3,q), hard Lefschetz and the lemma hold",
            "t != 0: H_dbar^{1,0} = <Phi1, Phi2>, h^{0,1} = 3",
            "t != 0: Massey product <[2t Phi1], [Phib2], [Phib2]> does not vanish",
            "t != 0: omega^2 ^ Phib2 is dbar-exact and the lemma fails",
        ],
        parameters: &[("t", "0")],
    },
];

pub fn list() -> &'static [CatalogEntry] {
    &ENTRIES
}

pub fn entry(name: &str) -> Result<&'static CatalogEntry, Error> {
    ENTRIES.iter().find(|e| e.name == name).ok_or_else(|| Error::UnknownCatalog(name.to_string()))
}

pub fn spec(name: &str) -> Result<ManifoldSpec, Error> {
    parse_spec(entry(name)?.document)
}

/// The validated instance of a catalog entry.
pub fn get(name: &str, params: &BTreeMap<String, Q>) -> Result<ComplexInstance, Error> {
    instantiate(&spec(name)?, params)
}

/// The document text, as shipped.
pub fn show(name: &str) -> Result<&'static str, Error> {
    Ok(entry(name)?.document)
}
