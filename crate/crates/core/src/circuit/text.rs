//! Bit-exact text format for circuits (`.qbc`).
//!
//! One gate per line:
//!
//! ```text
//! qubits 3;
//! register anc 0..1;
//! h  q0;
//! rz(3.1415926535897931) +q2 q0;
//! swap  q1,q2;
//! ```
//!
//! The three columns are kind(angle), controls and targets, single-space
//! separated; an empty control column leaves a double space. Angles are
//! printed with 17 significant digits so parsing reproduces the exact
//! double. `#` starts a line comment; macros are exported only as
//! comments (expand first for an executable file).

use std::collections::BTreeMap;

use thiserror::Error;

use super::{Circuit, Control, Gate, GateKind, MacroGate, Op, Polarity};

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("line {0}: {1}")]
    Line(usize, String),
    #[error("missing `qubits` header")]
    MissingHeader,
}

/// Renders a circuit. Macros are rejected unless `keep_macros_as_comments`
/// is set, in which case they appear as `# macro ...` lines.
pub fn export_text(circuit: &Circuit, keep_macros_as_comments: bool) -> String {
    let mut out = String::new();
    out.push_str(&format!("qubits {};\n", circuit.num_qubits));
    for (name, (start, end)) in &circuit.registers {
        out.push_str(&format!("register {name} {start}..{end};\n"));
    }
    for op in &circuit.ops {
        match op {
            Op::Gate(gate) => {
                out.push_str(&format_gate(gate));
                out.push('\n');
            }
            Op::Macro(mac) => {
                assert!(
                    keep_macros_as_comments,
                    "macro in export; expand_macros first or keep as comments"
                );
                out.push_str(&format_macro_comment(mac));
                out.push('\n');
            }
        }
    }
    out
}

fn format_gate(gate: &Gate) -> String {
    let kind = match gate.kind.angle() {
        Some(theta) => format!("{}({})", gate.kind.name(), format_angle(theta)),
        None => gate.kind.name().to_string(),
    };
    let controls = gate
        .controls
        .iter()
        .map(|c| {
            let sign = match c.polarity {
                Polarity::Positive => '+',
                Polarity::Negative => '-',
            };
            format!("{sign}q{}", c.qubit)
        })
        .collect::<Vec<_>>()
        .join(",");
    let targets = gate
        .targets
        .iter()
        .map(|q| format!("q{q}"))
        .collect::<Vec<_>>()
        .join(",");
    format!("{kind} {controls} {targets};")
}

fn format_macro_comment(mac: &MacroGate) -> String {
    let qubits = mac
        .qubits
        .iter()
        .map(|q| format!("q{q}"))
        .collect::<Vec<_>>()
        .join(",");
    let detail = match &mac.kind {
        super::MacroKind::AdderQft { n, m } | super::MacroKind::AdderLadder { n, m } => {
            format!("({n},{m})")
        }
        super::MacroKind::StatePrep(amps) => format!("[{} amplitudes]", amps.len()),
        _ => String::new(),
    };
    format!("# macro {}{} {}", mac.kind.name(), detail, qubits)
}

/// Plain-decimal rendering with 17 significant digits: enough for an
/// exact round trip of any f64.
pub fn format_angle(x: f64) -> String {
    if x == 0.0 {
        return "0.0".to_string();
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("exponent");
    let neg = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    debug_assert_eq!(digits.len(), 17);
    let point = exp + 1; // digit count before the decimal point
    let mut s = String::new();
    if neg {
        s.push('-');
    }
    if point <= 0 {
        s.push_str("0.");
        for _ in 0..(-point) {
            s.push('0');
        }
        s.push_str(&digits);
    } else if point as usize >= digits.len() {
        s.push_str(&digits);
        for _ in 0..(point as usize - digits.len()) {
            s.push('0');
        }
        s.push_str(".0");
    } else {
        s.push_str(&digits[..point as usize]);
        s.push('.');
        s.push_str(&digits[point as usize..]);
    }
    s
}

/// Parses the output of [`export_text`] back into a circuit
/// (macro comment lines are ignored like any other comment).
pub fn parse_text(text: &str) -> Result<Circuit, ParseError> {
    let mut num_qubits: Option<usize> = None;
    let mut registers = BTreeMap::new();
    let mut ops = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let body = line
            .strip_suffix(';')
            .ok_or_else(|| ParseError::Line(lineno, "missing `;`".into()))?
            .trim_end();

        if let Some(rest) = body.strip_prefix("qubits ") {
            let n = rest
                .trim()
                .parse::<usize>()
                .map_err(|_| ParseError::Line(lineno, format!("bad qubit count `{rest}`")))?;
            num_qubits = Some(n);
            continue;
        }
        if let Some(rest) = body.strip_prefix("register ") {
            let mut parts = rest.split_whitespace();
            let name = parts
                .next()
                .ok_or_else(|| ParseError::Line(lineno, "register needs a name".into()))?;
            let range = parts
                .next()
                .ok_or_else(|| ParseError::Line(lineno, "register needs a range".into()))?;
            let (start, end) = range
                .split_once("..")
                .ok_or_else(|| ParseError::Line(lineno, format!("bad range `{range}`")))?;
            let start = start
                .parse::<usize>()
                .map_err(|_| ParseError::Line(lineno, format!("bad range `{range}`")))?;
            let end = end
                .parse::<usize>()
                .map_err(|_| ParseError::Line(lineno, format!("bad range `{range}`")))?;
            registers.insert(name.to_string(), (start, end));
            continue;
        }

        ops.push(Op::Gate(parse_gate_line(body, lineno)?));
    }

    let num_qubits = num_qubits.ok_or(ParseError::MissingHeader)?;
    Ok(Circuit {
        num_qubits,
        ops,
        registers,
    })
}

fn parse_gate_line(body: &str, lineno: usize) -> Result<Gate, ParseError> {
    let err = |msg: String| ParseError::Line(lineno, msg);
    // Column layout: kind SP controls SP targets. Controls may be empty.
    let fields: Vec<&str> = body.split(' ').collect();
    if fields.len() != 3 {
        return Err(err(format!(
            "expected `kind controls targets`, got `{body}`"
        )));
    }
    let (kind_text, controls_text, targets_text) = (fields[0], fields[1], fields[2]);

    let (name, angle) = match kind_text.split_once('(') {
        Some((name, rest)) => {
            let angle_text = rest
                .strip_suffix(')')
                .ok_or_else(|| err(format!("unclosed angle in `{kind_text}`")))?;
            let angle = angle_text
                .parse::<f64>()
                .map_err(|_| err(format!("bad angle `{angle_text}`")))?;
            (name, Some(angle))
        }
        None => (kind_text, None),
    };

    let kind = match (name, angle) {
        ("x", None) => GateKind::X,
        ("y", None) => GateKind::Y,
        ("z", None) => GateKind::Z,
        ("h", None) => GateKind::H,
        ("s", None) => GateKind::S,
        ("swap", None) => GateKind::Swap,
        ("p", Some(t)) => GateKind::P(t),
        ("ry", Some(t)) => GateKind::Ry(t),
        ("rz", Some(t)) => GateKind::Rz(t),
        ("gphase", Some(t)) => GateKind::GlobalPhase(t),
        _ => return Err(err(format!("unknown gate `{kind_text}`"))),
    };

    let mut controls = Vec::new();
    if !controls_text.is_empty() {
        for token in controls_text.split(',') {
            let (polarity, qubit_text) = match token.split_at(1) {
                ("+", rest) => (Polarity::Positive, rest),
                ("-", rest) => (Polarity::Negative, rest),
                _ => return Err(err(format!("control `{token}` needs +/-"))),
            };
            let qubit = parse_qubit(qubit_text).ok_or_else(|| err(format!("bad control `{token}`")))?;
            controls.push(Control { qubit, polarity });
        }
    }

    let mut targets = Vec::new();
    for token in targets_text.split(',') {
        let qubit = parse_qubit(token).ok_or_else(|| err(format!("bad target `{token}`")))?;
        targets.push(qubit);
    }
    let expected = if matches!(kind, GateKind::Swap) { 2 } else { 1 };
    if targets.len() != expected {
        return Err(err(format!("{name} takes {expected} target(s)")));
    }
    if controls.iter().any(|c| targets.contains(&c.qubit)) {
        return Err(err("control and target wires overlap".into()));
    }

    Ok(Gate {
        kind,
        targets,
        controls,
    })
}

fn parse_qubit(token: &str) -> Option<usize> {
    token.strip_prefix('q')?.parse::<usize>().ok()
}

#[cfg(test)]
mod tests {
    use super::super::tests::random_circuit;
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn format_examples() {
        let mut circ = Circuit::new(3);
        circ.push(Gate::single(GateKind::H, 0));
        circ.push(Gate::controlled(
            GateKind::Rz(std::f64::consts::PI),
            0,
            vec![Control::positive(2)],
        ));
        let text = export_text(&circ, false);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "qubits 3;");
        assert_eq!(lines[1], "h  q0;");
        assert_eq!(lines[2], "rz(3.1415926535897931) +q2 q0;");
    }

    #[test]
    fn angle_formatting() {
        assert_eq!(format_angle(std::f64::consts::PI), "3.1415926535897931");
        assert_eq!(format_angle(0.0), "0.0");
        assert_eq!(format_angle(-0.5), "-0.50000000000000000");
        assert_eq!(format_angle(1e-4), "0.00010000000000000000");
        assert_eq!(format_angle(1024.0), "1024.0000000000000");
    }

    #[test]
    fn round_trip_random_circuits() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        for _ in 0..100 {
            let mut circ = random_circuit(&mut rng, 4, 20);
            circ.label_register("anc", 0, 2);
            let text = export_text(&circ, false);
            let back = parse_text(&text).unwrap();
            assert_eq!(back, circ);
        }
    }

    #[test]
    fn round_trip_preserves_lowering_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(45);
        let circ = random_circuit(&mut rng, 3, 25);
        let back = parse_text(&export_text(&circ, false)).unwrap();
        // bit-identical parameters mean bit-identical lowering
        let a = circ.lower().unwrap();
        let b = back.lower().unwrap();
        assert_eq!(a.entries(), b.entries());
    }

    #[test]
    fn comments_and_blank_lines_ignored() {
        let text = "# header comment\nqubits 2;\n\nh  q0; # trailing\n# macro qft q0,q1\n";
        let circ = parse_text(text).unwrap();
        assert_eq!(circ.num_qubits, 2);
        assert_eq!(circ.ops.len(), 1);
    }

    #[test]
    fn macros_export_as_comments_when_requested() {
        let mut circ = Circuit::new(2);
        circ.push_macro(MacroGate {
            kind: super::super::MacroKind::Qft,
            qubits: vec![0, 1],
        });
        let text = export_text(&circ, true);
        assert!(text.contains("# macro qft q0,q1"));
        let back = parse_text(&text).unwrap();
        assert!(back.ops.is_empty());
    }

    #[test]
    fn parse_errors() {
        assert_eq!(parse_text("h  q0;"), Err(ParseError::MissingHeader));
        assert!(matches!(
            parse_text("qubits 2;\nfoo  q0;"),
            Err(ParseError::Line(2, _))
        ));
        assert!(matches!(
            parse_text("qubits 2;\nh  q0"),
            Err(ParseError::Line(2, _))
        ));
        assert!(matches!(
            parse_text("qubits 2;\nx +q1 q1;"),
            Err(ParseError::Line(2, _))
        ));
    }

    proptest! {
        #[test]
        fn angle_string_round_trips_exactly(x in proptest::num::f64::NORMAL) {
            let s = format_angle(x);
            let back: f64 = s.parse().unwrap();
            prop_assert_eq!(back.to_bits(), x.to_bits());
        }
    }
}
