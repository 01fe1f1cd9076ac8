//! Pair types: byte codes for the double-rooted ordered configuration on
//! `{u, v} ∪ c(u) ∪ c(v)`.
//!
//! Layout: `[k]`, then one flag byte per vertex in order, then one byte per
//! pair `(i, j)`, `i < j`, in row-major order. Flag byte: low nibble is the
//! unary flag (0 none, 1 L, 2 R, 3..=6 K1..K4), bit 4 marks root `u`, bit 5
//! marks root `v`. Pair byte: 0 non-edge, 1 type-0 edge, 2 type-1 edge.
//!
//! Ordered structures have no non-trivial automorphisms, so reading the
//! configuration in order is already canonical.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Unary relations of the first expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Flag {
    L,
    R,
    K1,
    K2,
    K3,
    K4,
}

impl Flag {
    pub const ALL: [Flag; 6] = [Flag::L, Flag::R, Flag::K1, Flag::K2, Flag::K3, Flag::K4];

    pub fn name(self) -> &'static str {
        match self {
            Flag::L => "L",
            Flag::R => "R",
            Flag::K1 => "K1",
            Flag::K2 => "K2",
            Flag::K3 => "K3",
            Flag::K4 => "K4",
        }
    }

    pub fn from_name(s: &str) -> Option<Flag> {
        Flag::ALL.into_iter().find(|f| f.name() == s)
    }

    /// `i`-th K4 flag, `i` in `0..4`.
    pub fn k4(i: usize) -> Flag {
        [Flag::K1, Flag::K2, Flag::K3, Flag::K4][i]
    }

    pub fn is_k4(self) -> bool {
        !matches!(self, Flag::L | Flag::R)
    }

    /// Slot of the flag inside its centre (L=0, R=1, Ki=i-1).
    pub fn slot(self) -> usize {
        match self {
            Flag::L | Flag::K1 => 0,
            Flag::R | Flag::K2 => 1,
            Flag::K3 => 2,
            Flag::K4 => 3,
        }
    }

    /// Survives reduction.
    pub fn is_kept(self) -> bool {
        matches!(self, Flag::L | Flag::K1)
    }

    pub fn code(f: Option<Flag>) -> u8 {
        match f {
            None => 0,
            Some(f) => 1 + Flag::ALL.iter().position(|&g| g == f).unwrap() as u8,
        }
    }

    pub fn from_code(b: u8) -> Option<Option<Flag>> {
        match b {
            0 => Some(None),
            1..=6 => Some(Some(Flag::ALL[b as usize - 1])),
            _ => None,
        }
    }
}

const ROOT_U: u8 = 0x10;
const ROOT_V: u8 = 0x20;

/// Canonical code of a pair type; hex in text form.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeCode(pub Vec<u8>);

impl fmt::Debug for TypeCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TypeCode({})", hex::encode(&self.0))
    }
}

impl fmt::Display for TypeCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&hex::encode(&self.0))
    }
}

impl Serialize for TypeCode {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(&self.0))
    }
}

impl<'de> Deserialize<'de> for TypeCode {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        hex::decode(&s).map(TypeCode).map_err(serde::de::Error::custom)
    }
}

/// Decoded pair configuration, indexed by order position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairConfig {
    pub flags: Vec<Option<Flag>>,
    pub u: usize,
    pub v: usize,
    /// Symmetric: 0 non-edge, 1 type 0, 2 type 1.
    pub rel: Vec<Vec<u8>>,
}

/// Centres of the two roots inside a validated configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairShape {
    pub cu: Vec<usize>,
    pub cv: Vec<usize>,
}

impl PairShape {
    pub fn same_centre(&self) -> bool {
        self.cu == self.cv
    }
}

impl PairConfig {
    pub fn k(&self) -> usize {
        self.flags.len()
    }

    pub fn encode(&self) -> TypeCode {
        let k = self.k();
        let mut out = Vec::with_capacity(1 + k + k * (k - 1) / 2);
        out.push(k as u8);
        for i in 0..k {
            let mut b = Flag::code(self.flags[i]);
            if i == self.u {
                b |= ROOT_U;
            }
            if i == self.v {
                b |= ROOT_V;
            }
            out.push(b);
        }
        for i in 0..k {
            for j in i + 1..k {
                out.push(self.rel[i][j]);
            }
        }
        TypeCode(out)
    }

    /// Syntactic decoding; `None` on malformed bytes.
    pub fn decode(code: &TypeCode) -> Option<PairConfig> {
        let b = &code.0;
        let k = *b.first()? as usize;
        if k < 2 || b.len() != 1 + k + k * (k - 1) / 2 {
            return None;
        }
        let mut flags = Vec::with_capacity(k);
        let (mut u, mut v) = (None, None);
        for i in 0..k {
            let byte = b[1 + i];
            if byte & !(ROOT_U | ROOT_V | 0x0F) != 0 {
                return None;
            }
            flags.push(Flag::from_code(byte & 0x0F)?);
            if byte & ROOT_U != 0 {
                if u.replace(i).is_some() {
                    return None;
                }
            }
            if byte & ROOT_V != 0 {
                if v.replace(i).is_some() {
                    return None;
                }
            }
        }
        let (u, v) = (u?, v?);
        if u == v {
            return None;
        }
        let mut rel = vec![vec![0u8; k]; k];
        let mut p = 1 + k;
        for i in 0..k {
            for j in i + 1..k {
                if b[p] > 2 {
                    return None;
                }
                rel[i][j] = b[p];
                rel[j][i] = b[p];
                p += 1;
            }
        }
        Some(PairConfig { flags, u, v, rel })
    }

    /// Checks that the configuration arises as `t(u, v)` in some ordered good
    /// graph and returns the two centres.
    pub fn validate(&self) -> Result<PairShape, &'static str> {
        let k = self.k();
        if self.u >= self.v {
            return Err("root u must precede root v");
        }
        // Centres are the type-0 components among flagged vertices.
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut group_of = vec![usize::MAX; k];
        for s in 0..k {
            if self.flags[s].is_none() || group_of[s] != usize::MAX {
                continue;
            }
            let mut comp = vec![s];
            group_of[s] = groups.len();
            let mut i = 0;
            while i < comp.len() {
                let x = comp[i];
                for y in 0..k {
                    if self.rel[x][y] == 1 && self.flags[y].is_some() && group_of[y] == usize::MAX {
                        group_of[y] = groups.len();
                        comp.push(y);
                    }
                }
                i += 1;
            }
            comp.sort_unstable();
            groups.push(comp);
        }
        for g in &groups {
            let fl: Vec<Flag> = g.iter().map(|&x| self.flags[x].unwrap()).collect();
            let ok = match fl.as_slice() {
                [Flag::L, Flag::R] => true,
                [Flag::K1, Flag::K2, Flag::K3, Flag::K4] => true,
                _ => false,
            };
            if !ok {
                return Err("flagged centre is neither L<R nor K1<K2<K3<K4");
            }
            if g[g.len() - 1] - g[0] + 1 != g.len() {
                return Err("centre is not an interval");
            }
            for (i, &a) in g.iter().enumerate() {
                for &b in &g[i + 1..] {
                    if self.rel[a][b] != 1 {
                        return Err("centre vertices must be joined by type-0 edges");
                    }
                }
            }
        }
        if groups.len() > 2 {
            return Err("more than two centres");
        }
        let centre_of = |r: usize| -> Result<usize, &'static str> {
            if self.flags[r].is_some() {
                return Ok(group_of[r]);
            }
            let hits: Vec<usize> = (0..groups.len())
                .filter(|&gi| {
                    let g = &groups[gi];
                    g.len() == 2 && g.iter().all(|&c| self.rel[r][c] == 1)
                })
                .collect();
            match hits.as_slice() {
                [gi] => Ok(*gi),
                _ => Err("unflagged root must be an apex of exactly one chimney centre"),
            }
        };
        let gu = centre_of(self.u)?;
        let gv = centre_of(self.v)?;
        let used: Vec<usize> = if gu == gv { vec![gu] } else { vec![gu, gv] };
        if used.len() != groups.len() {
            return Err("configuration has a centre of no root");
        }
        // Vertex set: roots plus their centres.
        for x in 0..k {
            if x != self.u && x != self.v && self.flags[x].is_none() {
                return Err("vertex outside the roots and their centres");
            }
        }
        // Type-0 edges are exactly the structural ones.
        for x in 0..k {
            for y in x + 1..k {
                let structural = match (self.flags[x], self.flags[y]) {
                    (Some(_), Some(_)) => group_of[x] == group_of[y],
                    (None, Some(_)) => group_of[y] == centre_of(x)?,
                    (Some(_), None) => group_of[x] == centre_of(y)?,
                    (None, None) => false,
                };
                if structural != (self.rel[x][y] == 1) {
                    return Err("type-0 edges differ from the centre structure");
                }
            }
        }
        // Admissible order restricted to the configuration.
        let chimney_vertex = |x: usize| matches!(self.flags[x], Some(Flag::L | Flag::R));
        let k4_vertex = |x: usize| self.flags[x].is_some_and(Flag::is_k4);
        for x in 0..k {
            for y in x + 1..k {
                if k4_vertex(x) && chimney_vertex(y) {
                    return Err("K4 vertex before a chimney centre");
                }
                if self.flags[x].is_none() && self.flags[y].is_some() {
                    return Err("non-central vertex before a central one");
                }
            }
        }
        if self.flags[self.u].is_none() && self.flags[self.v].is_none() && gu != gv && groups[gu][0] > groups[gv][0] {
            return Err("apex order does not follow centre order");
        }
        // No type-1 edge lies in a triangle.
        for x in 0..k {
            for y in x + 1..k {
                if self.rel[x][y] != 2 {
                    continue;
                }
                if (0..k).any(|z| z != x && z != y && self.rel[x][z] != 0 && self.rel[y][z] != 0) {
                    return Err("type-1 edge in a triangle");
                }
            }
        }
        Ok(PairShape {
            cu: groups[gu].clone(),
            cv: groups[gv].clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(flags: &[Option<Flag>], u: usize, v: usize, edges: &[(usize, usize, u8)]) -> PairConfig {
        let k = flags.len();
        let mut rel = vec![vec![0; k]; k];
        for &(a, b, t) in edges {
            rel[a][b] = t;
            rel[b][a] = t;
        }
        PairConfig {
            flags: flags.to_vec(),
            u,
            v,
            rel,
        }
    }

    #[test]
    fn roundtrip_and_validation() {
        use Flag::*;
        // Two apexes of one chimney.
        let c = config(&[Some(L), Some(R), None, None], 2, 3, &[(0, 1, 1), (0, 2, 1), (1, 2, 1), (0, 3, 1), (1, 3, 1)]);
        let code = c.encode();
        assert_eq!(hex::encode(&code.0), "0401021020010101010100");
        assert_eq!(PairConfig::decode(&code).unwrap(), c);
        let shape = c.validate().unwrap();
        assert!(shape.same_centre());
        assert_eq!(shape.cu, vec![0, 1]);

        // Apexes adjacent by a type-1 edge close a triangle with the centre.
        let mut bad = c.clone();
        bad.rel[2][3] = 2;
        bad.rel[3][2] = 2;
        assert!(bad.validate().is_err());

        // K4 before a chimney centre.
        let k4 = config(
            &[Some(K1), Some(K2), Some(K3), Some(K4), Some(L), Some(R)],
            0,
            4,
            &[(0, 1, 1), (0, 2, 1), (0, 3, 1), (1, 2, 1), (1, 3, 1), (2, 3, 1), (4, 5, 1)],
        );
        assert_eq!(k4.validate().unwrap_err(), "K4 vertex before a chimney centre");
    }

    #[test]
    fn decode_rejects_garbage() {
        assert!(PairConfig::decode(&TypeCode(vec![])).is_none());
        assert!(PairConfig::decode(&TypeCode(vec![2, 0x10, 0x10, 0])).is_none());
        assert!(PairConfig::decode(&TypeCode(vec![2, 0x10, 0x20, 3])).is_none());
        assert!(PairConfig::decode(&TypeCode(vec![2, 0x17, 0x20, 0])).is_none());
        assert!(PairConfig::decode(&TypeCode(vec![2, 0x10, 0x20, 0])).is_some());
    }
}
