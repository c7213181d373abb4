//! The curve output format: `beta,alpha,nu,gamma,xtilde,objective` rows in
//! CSV or TSV, six fixed decimals, LF line endings.  Failed grid points
//! are emitted as a row with only `beta` filled, followed by an
//! `#error: ...` comment line.  Parsing an emitted file and re-emitting it
//! reproduces the bytes exactly.

/// Column names, in emission order.
pub const FIELDS: [&str; 6] = ["beta", "alpha", "nu", "gamma", "xtilde", "objective"];

/// Output flavor; the only difference is the separator character.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Tsv,
}

impl Format {
    pub fn separator(self) -> char {
        match self {
            Format::Csv => ',',
            Format::Tsv => '\t',
        }
    }

    pub fn header(self) -> String {
        FIELDS.join(&self.separator().to_string())
    }
}

/// One grid point of curve output.
#[derive(Debug, Clone, PartialEq)]
pub enum CurveRecord {
    Point {
        beta: f64,
        alpha: f64,
        nu: f64,
        gamma: f64,
        /// Worst-case signal magnitude; present only for weak curves.
        xtilde: Option<f64>,
        objective: f64,
    },
    Failure {
        beta: f64,
        message: String,
    },
}

/// Render records in the given format, header first, trailing newline.
pub fn emit(records: &[CurveRecord], format: Format) -> String {
    let sep = format.separator();
    let mut out = String::new();
    out.push_str(&format.header());
    out.push('\n');
    for record in records {
        match record {
            CurveRecord::Point {
                beta,
                alpha,
                nu,
                gamma,
                xtilde,
                objective,
            } => {
                let xt = xtilde.map(|x| format!("{x:.6}")).unwrap_or_default();
                out.push_str(&format!(
                    "{beta:.6}{sep}{alpha:.6}{sep}{nu:.6}{sep}{gamma:.6}{sep}{xt}{sep}{objective:.6}\n"
                ));
            }
            CurveRecord::Failure { beta, message } => {
                out.push_str(&format!("{beta:.6}{sep}{sep}{sep}{sep}{sep}\n"));
                out.push_str(&format!("#error: {message}\n"));
            }
        }
    }
    out
}

/// Parse text produced by [`emit`], detecting the format from the header.
pub fn parse(text: &str) -> Result<(Vec<CurveRecord>, Format), String> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| "empty input".to_string())?;
    let format = if header == Format::Csv.header() {
        Format::Csv
    } else if header == Format::Tsv.header() {
        Format::Tsv
    } else {
        return Err(format!("unrecognized header '{header}'"));
    };
    let sep = format.separator();
    let mut records: Vec<CurveRecord> = Vec::new();
    for (idx, line) in lines.enumerate() {
        let lineno = idx + 2;
        if let Some(msg) = line.strip_prefix("#error: ") {
            match records.last_mut() {
                Some(CurveRecord::Failure { message, .. }) if message.is_empty() => {
                    *message = msg.to_string();
                }
                _ => return Err(format!("line {lineno}: error comment without a failed row")),
            }
            continue;
        }
        if line.starts_with('#') {
            return Err(format!("line {lineno}: unsupported comment '{line}'"));
        }
        let fields: Vec<&str> = line.split(sep).collect();
        if fields.len() != FIELDS.len() {
            return Err(format!(
                "line {lineno}: expected {} fields, got {}",
                FIELDS.len(),
                fields.len()
            ));
        }
        let number = |i: usize| -> Result<f64, String> {
            fields[i]
                .parse()
                .map_err(|_| format!("line {lineno}: bad {} '{}'", FIELDS[i], fields[i]))
        };
        let beta = number(0)?;
        if fields[1].is_empty() {
            if fields[2..].iter().any(|f| !f.is_empty()) {
                return Err(format!("line {lineno}: partially filled failure row"));
            }
            records.push(CurveRecord::Failure {
                beta,
                message: String::new(),
            });
            continue;
        }
        let alpha = number(1)?;
        let nu = number(2)?;
        let gamma = number(3)?;
        let xtilde = if fields[4].is_empty() {
            None
        } else {
            Some(number(4)?)
        };
        let objective = number(5)?;
        records.push(CurveRecord::Point {
            beta,
            alpha,
            nu,
            gamma,
            xtilde,
            objective,
        });
    }
    Ok((records, format))
}
