use super::{AlgebraError, CodeSpec, GroupParams};

/// A registered code with its reference parameters.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub spec: CodeSpec,
    pub aliases: &'static [&'static str],
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub d_circ: usize,
}

pub fn catalog() -> Vec<CatalogEntry> {
    let mk = |name: &str, ell, m, alpha, a, b| {
        CodeSpec::new(name, GroupParams::new(ell, m, alpha).expect("valid params"), a, b)
            .expect("valid catalog polynomials")
    };
    vec![
        CatalogEntry {
            spec: mk("bb-72", 6, 6, 0, [(0, 0), (1, 0), (-1, -3)], [(0, 0), (0, 1), (3, -1)]),
            aliases: &["72", "72-12-6", "[[72,12,6]]"],
            n: 72,
            k: 12,
            d: 6,
            d_circ: 6,
        },
        CatalogEntry {
            spec: mk("tt-120", 6, 10, 4, [(0, 0), (1, 0), (-2, 1)], [(0, 0), (0, 1), (1, 2)]),
            aliases: &["120", "120-8-12", "[[120,8,12]]"],
            n: 120,
            k: 8,
            d: 12,
            d_circ: 10,
        },
        CatalogEntry {
            spec: mk("gross", 12, 6, 0, [(0, 0), (1, 0), (-1, -3)], [(0, 0), (0, 1), (3, -1)]),
            aliases: &["144", "144-12-12", "[[144,12,12]]"],
            n: 144,
            k: 12,
            d: 12,
            d_circ: 10,
        },
        CatalogEntry {
            spec: mk("tt-170", 5, 17, -7, [(0, 0), (1, 0), (0, -4)], [(0, 0), (0, 1), (4, 0)]),
            aliases: &["170", "170-16-10", "[[170,16,10]]"],
            n: 170,
            k: 16,
            d: 10,
            d_circ: 10,
        },
    ]
}

pub fn catalog_entry(name: &str) -> Result<CatalogEntry, AlgebraError> {
    let key = name.trim().to_ascii_lowercase();
    catalog()
        .into_iter()
        .find(|e| e.spec.name == key || e.aliases.contains(&key.as_str()))
        .ok_or_else(|| AlgebraError::UnknownCode(name.to_string()))
}

pub fn catalog_lookup(name: &str) -> Result<CodeSpec, AlgebraError> {
    catalog_entry(name).map(|e| e.spec)
}
