//! Command-line literals: level sets, rectangle sets, number lists.

use std::str::FromStr;

use selfsim_core::flow::RectSet;
use selfsim_core::ratio;
use selfsim_core::tower::LevelSet;
use selfsim_core::{BigInt, BigRational};

/// `level:<stage>:<i>[,<i>...]`
pub fn level_set(text: &str) -> Result<LevelSet, String> {
    let (stage, body) = tagged(text, "level")?;
    let indices = body
        .split(',')
        .map(|i| {
            BigInt::from_str(i.trim()).map_err(|_| format!("bad level index `{i}` in `{text}`"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(LevelSet::new(stage, indices))
}

/// `rect:<stage>:<a>-<b>[,<a>-<b>...]` with rational endpoints.
pub fn rect_set(text: &str) -> Result<RectSet, String> {
    let (stage, body) = tagged(text, "rect")?;
    let intervals = body
        .split(',')
        .map(|piece| {
            let (a, b) = piece
                .split_once('-')
                .ok_or_else(|| format!("interval `{piece}` in `{text}` needs the form a-b"))?;
            Ok((rational(a)?, rational(b)?))
        })
        .collect::<Result<Vec<_>, String>>()?;
    Ok(RectSet::new(stage, intervals))
}

fn tagged<'a>(text: &'a str, tag: &str) -> Result<(u32, &'a str), String> {
    let mut parts = text.splitn(3, ':');
    match (parts.next(), parts.next(), parts.next()) {
        (Some(t), Some(stage), Some(body)) if t == tag && !body.is_empty() => {
            let stage = stage
                .parse()
                .map_err(|_| format!("bad stage `{stage}` in `{text}`"))?;
            Ok((stage, body))
        }
        _ => Err(format!("expected `{tag}:<stage>:...`, got `{text}`")),
    }
}

pub fn rational(text: &str) -> Result<BigRational, String> {
    ratio::parse(text).ok_or_else(|| format!("`{text}` is not a rational number"))
}

pub fn rational_list(text: &str) -> Result<Vec<BigRational>, String> {
    text.split(',').map(rational).collect()
}

pub fn int_list<T: FromStr>(text: &str) -> Result<Vec<T>, String> {
    text.split(',')
        .map(|v| {
            v.trim()
                .parse()
                .map_err(|_| format!("`{v}` is not a valid integer"))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_literals() {
        assert_eq!(level_set("level:1:0").unwrap(), LevelSet::base(1));
        assert_eq!(level_set("level:2:3,1").unwrap(), LevelSet::new(2, [1, 3]));
        assert!(level_set("level:2:").is_err());
        assert!(level_set("lvl:2:1").is_err());
        assert!(level_set("level:x:1").is_err());
        assert!(level_set("level:1:a").is_err());
    }

    #[test]
    fn rect_literals() {
        let set = rect_set("rect:1:0-1/2,1/2-1").unwrap();
        assert_eq!(set.stage(), 1);
        assert_eq!(set.intervals().len(), 1);
        assert!(rect_set("rect:1:0").is_err());
    }

    #[test]
    fn lists() {
        assert_eq!(int_list::<i64>("1,-2,-1").unwrap(), vec![1, -2, -1]);
        assert_eq!(rational_list("1/2,3").unwrap().len(), 2);
        assert!(int_list::<u32>("1,,2").is_err());
    }
}
