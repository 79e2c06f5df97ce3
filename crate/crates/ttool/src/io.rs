//! Tensor files: `{"shape":[m,n,p],"data":[[re,im],...]}` with entries in
//! slice-major order.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use ttensor::{Tensor3, C64};

use crate::error::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorFile {
    pub shape: [usize; 3],
    pub data: Vec<[f64; 2]>,
}

impl From<&Tensor3> for TensorFile {
    fn from(t: &Tensor3) -> Self {
        Self { shape: t.shape(), data: t.as_slice().iter().map(|z| [z.re, z.im]).collect() }
    }
}

impl TensorFile {
    pub fn into_tensor(self) -> Result<Tensor3, CliError> {
        let [m, n, p] = self.shape;
        if m == 0 || n == 0 || p == 0 {
            return Err(CliError::Format(format!("shape {:?} has a zero dimension", self.shape)));
        }
        let want = m.checked_mul(n).and_then(|x| x.checked_mul(p));
        if want != Some(self.data.len()) {
            return Err(CliError::Format(format!(
                "shape {:?} needs {} entries, file has {}",
                self.shape,
                m.saturating_mul(n).saturating_mul(p),
                self.data.len()
            )));
        }
        let data = self.data.into_iter().map(|[re, im]| C64::new(re, im)).collect();
        Ok(Tensor3::new(m, n, p, data)?)
    }
}

pub fn parse_tensor(text: &str) -> Result<Tensor3, serde_json::Error> {
    serde_json::from_str::<TensorFile>(text)
        .and_then(|f| f.into_tensor().map_err(|e| serde::de::Error::custom(e.to_string())))
}

pub fn read_tensor(path: &Path) -> Result<Tensor3, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    let file: TensorFile =
        serde_json::from_str(&text).map_err(|source| CliError::Json { path: path.into(), source })?;
    file.into_tensor()
}

pub fn tensor_json(t: &Tensor3) -> serde_json::Value {
    serde_json::to_value(TensorFile::from(t)).expect("tensor serializes")
}

/// Pretty JSON with a trailing newline.
pub fn to_text(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("value serializes");
    s.push('\n');
    s
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io { path: path.into(), source })
}

pub fn write_tensor(path: &Path, t: &Tensor3) -> Result<(), CliError> {
    write_text(path, &to_text(&tensor_json(t)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let t = Tensor3::new(
            1,
            2,
            2,
            vec![C64::new(1.0, -0.5), C64::new(0.25, 0.0), C64::new(3.0, 2.0), C64::new(-1e-300, 7.0)],
        )
        .unwrap();
        let text = to_text(&tensor_json(&t));
        assert_eq!(parse_tensor(&text).unwrap(), t);
    }

    #[test]
    fn rejects_wrong_length() {
        assert!(parse_tensor(r#"{"shape":[1,1,2],"data":[[1,0]]}"#).is_err());
        assert!(parse_tensor(r#"{"shape":[0,1,1],"data":[]}"#).is_err());
        assert!(parse_tensor(r#"{"shape":[1,1,1],"data":[[1,0]],"extra":1}"#).is_err());
        assert!(parse_tensor(r#"{"shape":[1,1,1],"data":[[1,0]]}"#).is_ok());
    }
}
