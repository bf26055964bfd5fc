use std::fmt::Write;

use super::{Channel, Circuit, CircuitError, MeasLabel, Op};

fn join<T: ToString>(v: impl IntoIterator<Item = T>) -> String {
    v.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

/// One op per line; see the README for the grammar.
pub fn serialize(c: &Circuit) -> String {
    let mut s = String::new();
    for op in &c.ops {
        let line = match op {
            Op::ResetZ(q) => format!("RZ {}", join(q)),
            Op::ResetX(q) => format!("RX {}", join(q)),
            Op::MeasureZ(q) => format!("MZ {}", join(q)),
            Op::MeasureX(q) => format!("MX {}", join(q)),
            Op::Cnot(p) => format!("CNOT {}", join(p.iter().flat_map(|&(c, t)| [c, t]))),
            Op::Tick => "TICK".to_string(),
            Op::Detector(m) => format!("DETECTOR {}", join(m)),
            Op::Observable(k, m) => format!("OBSERVABLE {k} {}", join(m)),
            Op::Noise { channel, p, targets } => format!("{}({p}) {}", channel.name(), join(targets)),
            Op::NoisyBegin => "NOISY_BEGIN".to_string(),
            Op::NoisyEnd => "NOISY_END".to_string(),
        };
        let _ = writeln!(s, "{}", line.trim_end());
    }
    s
}

pub fn parse(text: &str) -> Result<Circuit, CircuitError> {
    let mut ops = Vec::new();
    let mut max_q: Option<usize> = None;
    let mut meas = 0usize;
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| CircuitError::Parse { line: ln + 1, msg };
        let mut parts = line.split_whitespace();
        let head = parts.next().expect("nonempty");
        let nums: Vec<usize> = parts
            .map(|t| t.parse::<usize>().map_err(|_| err(format!("bad integer {t:?}"))))
            .collect::<Result<_, _>>()?;
        let mut qubits = |v: &[usize]| -> Result<Vec<usize>, CircuitError> {
            if v.is_empty() {
                return Err(err(format!("{head} needs targets")));
            }
            for &q in v {
                max_q = Some(max_q.map_or(q, |m| m.max(q)));
            }
            Ok(v.to_vec())
        };
        let op = match head {
            "RZ" => Op::ResetZ(qubits(&nums)?),
            "RX" => Op::ResetX(qubits(&nums)?),
            "MZ" | "MX" => {
                let q = qubits(&nums)?;
                meas += q.len();
                if head == "MZ" {
                    Op::MeasureZ(q)
                } else {
                    Op::MeasureX(q)
                }
            }
            "CNOT" => {
                if nums.len() % 2 != 0 {
                    return Err(err("CNOT needs an even number of targets".into()));
                }
                let q = qubits(&nums)?;
                let pairs: Vec<(usize, usize)> = q.chunks(2).map(|c| (c[0], c[1])).collect();
                if pairs.iter().any(|(c, t)| c == t) {
                    return Err(err("CNOT control equals target".into()));
                }
                Op::Cnot(pairs)
            }
            "TICK" | "NOISY_BEGIN" | "NOISY_END" if !nums.is_empty() => {
                return Err(err(format!("{head} takes no arguments")));
            }
            "TICK" => Op::Tick,
            "NOISY_BEGIN" => Op::NoisyBegin,
            "NOISY_END" => Op::NoisyEnd,
            "DETECTOR" | "OBSERVABLE" => {
                let (k, m) = if head == "OBSERVABLE" {
                    match nums.split_first() {
                        Some((k, m)) => (Some(*k), m.to_vec()),
                        None => return Err(err("OBSERVABLE needs an index".into())),
                    }
                } else {
                    (None, nums.clone())
                };
                if let Some(&bad) = m.iter().find(|&&x| x >= meas) {
                    return Err(err(format!("measurement index {bad} not yet defined")));
                }
                match k {
                    Some(k) => Op::Observable(k, m),
                    None => Op::Detector(m),
                }
            }
            _ => {
                let (name, p) = parse_channel(head).ok_or_else(|| err(format!("unknown instruction {head:?}")))?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(err(format!("probability {p} out of range")));
                }
                let targets = match name {
                    Channel::Flip => {
                        if let Some(&bad) = nums.iter().find(|&&x| x >= meas) {
                            return Err(err(format!("measurement index {bad} not yet defined")));
                        }
                        nums.clone()
                    }
                    Channel::Dep2 if nums.len() % 2 != 0 => {
                        return Err(err("DEP2 needs qubit pairs".into()));
                    }
                    _ => qubits(&nums)?,
                };
                Op::Noise { channel: name, p, targets }
            }
        };
        ops.push(op);
    }
    let mut c = Circuit::new(max_q.map_or(0, |m| m + 1));
    c.ops = ops;
    c.labels = vec![MeasLabel::Unlabeled; meas];
    Ok(c)
}

fn parse_channel(head: &str) -> Option<(Channel, f64)> {
    let open = head.find('(')?;
    let inner = head[open + 1..].strip_suffix(')')?;
    let ch = match &head[..open] {
        "DEP1" => Channel::Dep1,
        "DEP2" => Channel::Dep2,
        "XERR" => Channel::XErr,
        "ZERR" => Channel::ZErr,
        "FLIP" => Channel::Flip,
        _ => return None,
    };
    Some((ch, inner.parse().ok()?))
}
