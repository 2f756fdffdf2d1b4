use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericError {
    #[error("shape mismatch in {op}: left is {left_rows}x{left_cols}, right is {right_rows}x{right_cols}")]
    Shape {
        op: &'static str,
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
    #[error("data length {len} does not match {rows}x{cols}")]
    DataLength {
        rows: usize,
        cols: usize,
        len: usize,
    },
    #[error("non-finite value produced by {0}")]
    NonFinite(&'static str),
    #[error("non-finite loss while probing {param}[{row},{col}]")]
    NonFiniteLoss {
        param: String,
        row: usize,
        col: usize,
    },
    #[error("duplicate parameter name `{0}`")]
    DuplicateParam(String),
    #[error("optimizer configuration: {0}")]
    Config(String),
}
