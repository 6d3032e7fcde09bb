//! Text form of a game strategy: `STATE,P,P̄` such as `|1>,1,0bar`.

use cutlab_core::game::{qubit_state, GameStrategy};
use cutlab_core::C64;

fn state(s: &str) -> Result<(C64, C64), String> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let re = |x: f64| C64::new(x, 0.0);
    Ok(match s.trim() {
        "|0>" => (re(1.0), re(0.0)),
        "|1>" => (re(0.0), re(1.0)),
        "|+>" => (re(h), re(h)),
        "|->" => (re(h), re(-h)),
        "|+i>" => (re(h), C64::new(0.0, h)),
        "|-i>" => (re(h), C64::new(0.0, -h)),
        other => {
            // bloch:THETA:PHI in radians
            let rest = other.strip_prefix("bloch:").ok_or_else(|| format!("unknown state `{other}`"))?;
            let (t, p) = rest.split_once(':').ok_or_else(|| format!("expected bloch:THETA:PHI, got `{other}`"))?;
            let t: f64 = t.parse().map_err(|_| format!("bad angle `{t}`"))?;
            let p: f64 = p.parse().map_err(|_| format!("bad angle `{p}`"))?;
            (re((t / 2.0).cos()), C64::from_polar((t / 2.0).sin(), p))
        }
    })
}

fn bit(s: &str, bar: bool) -> Result<usize, String> {
    let t = s.trim();
    let digits = if bar { t.strip_suffix("bar").ok_or_else(|| format!("expected 0bar or 1bar, got `{t}`"))? } else { t };
    match digits {
        "0" => Ok(0),
        "1" => Ok(1),
        _ => Err(format!("expected a bit, got `{t}`")),
    }
}

pub fn parse_strategy(spec: &str) -> Result<GameStrategy, String> {
    let mut parts = spec.rsplitn(3, ',');
    let pb = parts.next().ok_or("missing P̄")?;
    let p = parts.next().ok_or("missing P")?;
    let st = parts.next().ok_or("missing state")?;
    let (a0, a1) = state(st)?;
    let rho = qubit_state(a0, a1).map_err(|e| e.to_string())?;
    GameStrategy::new(rho, bit(p, false)?, bit(pb, true)?).map_err(|e| e.to_string())
}
