use crate::sir::{ActionProfile, Trajectory};

/// Significant digits used for every float written to CSV.
pub const SIG_DIGITS: usize = 12;

/// `%.12g`-style rendering: shortest of fixed or scientific notation with 12
/// significant digits and trailing zeros removed.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    if exp < -4 || exp >= SIG_DIGITS as i32 {
        let mantissa = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Profile as `u_1;u_2;...` so it fits in one CSV field.
pub fn fmt_profile(u: &ActionProfile) -> String {
    u.as_slice().iter().map(|&x| fmt_sig(x)).collect::<Vec<_>>().join(";")
}

/// `t,s_1..s_K,i_1..i_K,r_1..r_K`, one row per stored time.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let k = traj.s.first().map_or(0, Vec::len);
    let mut header = vec!["t".to_string()];
    for name in ["s", "i", "r"] {
        header.extend((1..=k).map(|j| format!("{name}_{j}")));
    }
    let mut out = header.join(",");
    out.push('\n');
    for row in 0..traj.len() {
        let mut fields = Vec::with_capacity(1 + 3 * k);
        fields.push(fmt_sig(traj.times[row]));
        for series in [&traj.s, &traj.i, &traj.r] {
            fields.extend(series[row].iter().map(|&x| fmt_sig(x)));
        }
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}
