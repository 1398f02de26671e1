//! Text file format for codes and witnesses.
//!
//! A file is one JSON object:
//!
//! ```text
//! {"version":1,"q":2,"t":3,"m":6,"p":6,
//!  "columns":[[[1,0,0,0,0,0],[0,1,0,0,0,0],[0,0,1,1,0,0]], ...],
//!  "witness":{"0":[[0],[5],[1,4],[2,3]], ...}}
//! ```
//!
//! Each column is its `t × p` coefficient matrix, row by row. The witness is
//! optional and maps an item index to its list of column subsets. The writer
//! puts one column and one witness item per line so files diff cleanly.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Deserialize;

use crate::code::{ArrayCode, Server, Witness};
use crate::error::{Error, Result};
use crate::gf::{CoeffVector, PrimeField};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CodeFile {
    version: u32,
    q: u32,
    t: usize,
    m: usize,
    p: usize,
    columns: Vec<Vec<Vec<u32>>>,
    #[serde(default)]
    witness: Option<BTreeMap<usize, Vec<Vec<usize>>>>,
}

pub fn serialize(code: &ArrayCode, witness: Option<&Witness>) -> String {
    let mut out = String::new();
    let _ = write!(
        out,
        "{{\"version\":{},\"q\":{},\"t\":{},\"m\":{},\"p\":{},\n\"columns\":[",
        FORMAT_VERSION,
        code.field().modulus(),
        code.t(),
        code.m(),
        code.p()
    );
    for (j, col) in code.columns().iter().enumerate() {
        let rows: Vec<&[u32]> = col.cells().iter().map(CoeffVector::as_slice).collect();
        out.push_str(if j == 0 { "\n" } else { ",\n" });
        out.push_str(&serde_json::to_string(&rows).expect("plain integers serialize"));
    }
    out.push_str("\n]");
    if let Some(w) = witness {
        out.push_str(",\n\"witness\":{");
        for (i, subsets) in w.items().iter().enumerate() {
            out.push_str(if i == 0 { "\n" } else { ",\n" });
            let _ = write!(
                out,
                "\"{i}\":{}",
                serde_json::to_string(subsets).expect("plain integers serialize")
            );
        }
        out.push_str("\n}");
    }
    out.push_str("}\n");
    out
}

pub fn deserialize(text: &str) -> Result<(ArrayCode, Option<Witness>)> {
    let file: CodeFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if file.version != FORMAT_VERSION {
        return Err(Error::InvalidCode(format!(
            "unsupported format version {}",
            file.version
        )));
    }
    let field = PrimeField::new(file.q)?;
    if file.columns.len() != file.m {
        return Err(Error::InvalidCode(format!(
            "header says m = {} but {} columns follow",
            file.m,
            file.columns.len()
        )));
    }
    let columns = file
        .columns
        .into_iter()
        .map(|rows| Server::new(rows.into_iter().map(CoeffVector::new).collect()))
        .collect();
    let code = ArrayCode::new(field, file.t, file.p, columns)?;

    let witness = match file.witness {
        None => None,
        Some(map) => {
            let mut items = vec![Vec::new(); code.p()];
            for (item, subsets) in map {
                if item >= code.p() {
                    return Err(Error::IndexOutOfRange {
                        index: item,
                        limit: code.p(),
                    });
                }
                items[item] = subsets;
            }
            Some(Witness::new(items))
        }
    };
    Ok((code, witness))
}
