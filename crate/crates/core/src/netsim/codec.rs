//! Line-oriented ASCII frames for radios in transparent serial mode.
//!
//! ```text
//! SWRM1,<id>,<tick>,<x>,<y>,<hx>,<hy>,<speed>,<tfx|->,<tfy|->,<flags>*<cs>\n
//! ```
//!
//! Floats use the shortest decimal that parses back to the same `f64`, so a
//! decoded state is bit-for-bit the encoded one. `<cs>` is the XOR of every
//! byte between `SWRM1,` and `*`, as two lowercase hex digits. `<flags>` is the
//! decimal value of [`RoleFlags::bits`].

use std::fmt::Write as _;

use thiserror::Error;

use crate::types::{AgentId, AgentState, Heading, RoleFlags, Vec2};

pub const SENTINEL: &str = "SWRM1,";
const FIELDS: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrameError {
    #[error("malformed frame: {0}")]
    BadFrame(&'static str),
    #[error("checksum mismatch: frame says {declared:02x}, payload gives {computed:02x}")]
    BadChecksum { declared: u8, computed: u8 },
}

fn xor(bytes: &[u8]) -> u8 {
    bytes.iter().fold(0, |acc, b| acc ^ b)
}

pub fn encode(state: &AgentState) -> Vec<u8> {
    let mut body = String::with_capacity(96);
    let (tfx, tfy) = match state.target_found {
        Some(t) => (t.x.to_string(), t.y.to_string()),
        None => ("-".to_string(), "-".to_string()),
    };
    write!(
        body,
        "{},{},{},{},{},{},{},{},{},{}",
        state.id.0,
        state.tick,
        state.position.x,
        state.position.y,
        state.heading.x(),
        state.heading.y(),
        state.speed,
        tfx,
        tfy,
        state.flags.bits()
    )
    .expect("writing to a String cannot fail");
    let cs = xor(body.as_bytes());
    format!("{SENTINEL}{body}*{cs:02x}\n").into_bytes()
}

fn parse_f64(field: &str) -> Result<f64, FrameError> {
    // only plain decimals; rejects "inf", "NaN" and friends
    if field.is_empty() || !field.bytes().all(|b| b.is_ascii_digit() || b == b'.' || b == b'-' || b == b'e' || b == b'E') {
        return Err(FrameError::BadFrame("non-numeric float field"));
    }
    let v: f64 = field.parse().map_err(|_| FrameError::BadFrame("unparsable float"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(FrameError::BadFrame("non-finite float"))
    }
}

fn parse_int<T: std::str::FromStr>(field: &str) -> Result<T, FrameError> {
    if field.is_empty() || !field.bytes().all(|b| b.is_ascii_digit()) {
        return Err(FrameError::BadFrame("non-numeric integer field"));
    }
    field.parse().map_err(|_| FrameError::BadFrame("integer out of range"))
}

fn hex_digit(b: u8) -> Result<u8, FrameError> {
    match b {
        b'0'..=b'9' => Ok(b - b'0'),
        b'a'..=b'f' => Ok(b - b'a' + 10),
        _ => Err(FrameError::BadFrame("checksum is not two lowercase hex digits")),
    }
}

pub fn decode(frame: &[u8]) -> Result<AgentState, FrameError> {
    let rest = frame.strip_prefix(SENTINEL.as_bytes()).ok_or(FrameError::BadFrame("missing sentinel"))?;
    let rest = rest.strip_suffix(b"\n").ok_or(FrameError::BadFrame("missing line terminator"))?;
    if rest.len() < 3 || rest[rest.len() - 3] != b'*' {
        return Err(FrameError::BadFrame("missing checksum"));
    }
    let (body, tail) = rest.split_at(rest.len() - 3);
    let declared = hex_digit(tail[1])? << 4 | hex_digit(tail[2])?;
    if body.contains(&b'*') || body.contains(&b'\n') {
        return Err(FrameError::BadFrame("stray delimiter"));
    }
    let computed = xor(body);
    if declared != computed {
        return Err(FrameError::BadChecksum { declared, computed });
    }

    let body = std::str::from_utf8(body).map_err(|_| FrameError::BadFrame("non-ASCII payload"))?;
    let fields: Vec<&str> = body.split(',').collect();
    if fields.len() != FIELDS {
        return Err(FrameError::BadFrame("wrong field count"));
    }
    let id = AgentId(parse_int(fields[0])?);
    let tick = parse_int(fields[1])?;
    let position = Vec2::new(parse_f64(fields[2])?, parse_f64(fields[3])?);
    let heading = Heading::from_unit(parse_f64(fields[4])?, parse_f64(fields[5])?)
        .map_err(|_| FrameError::BadFrame("heading is not a unit vector"))?;
    let speed = parse_f64(fields[6])?;
    if speed < 0.0 {
        return Err(FrameError::BadFrame("negative speed"));
    }
    let target_found = match (fields[7], fields[8]) {
        ("-", "-") => None,
        (x, y) => Some(Vec2::new(parse_f64(x)?, parse_f64(y)?)),
    };
    let flags = RoleFlags::from_bits(parse_int(fields[9])?).ok_or(FrameError::BadFrame("unknown flag bits"))?;
    Ok(AgentState { id, tick, position, heading, speed, target_found, flags })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn example() -> AgentState {
        AgentState {
            id: AgentId(7),
            tick: 12,
            position: Vec2::new(1.5, -2.0),
            heading: Heading::EAST,
            speed: 0.2,
            target_found: None,
            flags: RoleFlags::default(),
        }
    }

    #[test]
    fn literal_frame_decodes() {
        let payload = "7,12,1.5,-2.0,1,0,0.2,-,-,0";
        // checksum by hand, byte by byte
        let mut cs = 0u8;
        for b in payload.bytes() {
            cs ^= b;
        }
        let frame = format!("SWRM1,{payload}*{cs:02x}\n");
        let state = decode(frame.as_bytes()).unwrap();
        assert_eq!(state, example());
    }

    #[test]
    fn literal_frame_checksum_value() {
        // XOR over "7,12,1.5,-2.0,1,0,0.2,-,-,0", worked out separately
        let frame = b"SWRM1,7,12,1.5,-2.0,1,0,0.2,-,-,0*2e\n";
        assert_eq!(decode(frame).unwrap(), example());
    }

    #[test]
    fn encode_is_shortest_decimal() {
        let text = String::from_utf8(encode(&example())).unwrap();
        assert_eq!(text, "SWRM1,7,12,1.5,-2,1,0,0.2,-,-,0*30\n");
    }

    #[test]
    fn rejects_malformed() {
        assert_eq!(decode(b"SWRM2,7,12*00\n"), Err(FrameError::BadFrame("missing sentinel")));
        let good = encode(&example());
        assert!(matches!(decode(&good[..good.len() - 1]), Err(FrameError::BadFrame(_))));
        let mut flipped = good.clone();
        flipped[8] ^= 0x01;
        assert!(matches!(decode(&flipped), Err(FrameError::BadChecksum { .. })));
        let mut short = String::from("6,1,0,0,1,0,0,-,-");
        let cs = xor(short.as_bytes());
        short = format!("SWRM1,{short}*{cs:02x}\n");
        assert_eq!(decode(short.as_bytes()), Err(FrameError::BadFrame("wrong field count")));
        let body = "6,1,0,0,1,1,0,-,-,0";
        let frame = format!("SWRM1,{body}*{:02x}\n", xor(body.as_bytes()));
        assert!(matches!(decode(frame.as_bytes()), Err(FrameError::BadFrame(_))));
        let body = "6,1,inf,0,1,0,0,-,-,0";
        let frame = format!("SWRM1,{body}*{:02x}\n", xor(body.as_bytes()));
        assert!(matches!(decode(frame.as_bytes()), Err(FrameError::BadFrame(_))));
    }

    pub(crate) fn arb_state() -> impl Strategy<Value = AgentState> {
        (
            any::<u32>(),
            any::<u64>(),
            (-1e7f64..1e7, -1e7f64..1e7),
            -std::f64::consts::PI..std::f64::consts::PI,
            0.0f64..5.0,
            prop::option::of((-1e7f64..1e7, -1e7f64..1e7)),
            0u8..4,
        )
            .prop_map(|(id, tick, (x, y), th, speed, tf, bits)| AgentState {
                id: AgentId(id),
                tick,
                position: Vec2::new(x, y),
                heading: Heading::from_angle(th),
                speed,
                target_found: tf.map(|(a, b)| Vec2::new(a, b)),
                flags: RoleFlags::from_bits(bits).unwrap(),
            })
    }

    proptest! {
        #[test]
        fn round_trip(state in arb_state()) {
            let decoded = decode(&encode(&state)).unwrap();
            prop_assert_eq!(decoded, state);
            prop_assert_eq!(decoded.position.x.to_bits(), state.position.x.to_bits());
            prop_assert_eq!(decoded.heading.y().to_bits(), state.heading.y().to_bits());
        }

        #[test]
        fn single_byte_mutation_rejected(state in arb_state(), pos in any::<prop::sample::Index>(), byte in any::<u8>()) {
            let mut frame = encode(&state);
            let i = pos.index(frame.len());
            prop_assume!(frame[i] != byte);
            frame[i] = byte;
            prop_assert!(decode(&frame).is_err());
        }
    }
}
