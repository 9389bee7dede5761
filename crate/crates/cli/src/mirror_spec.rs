//! `--mirror` specifications and the layered-stack file format.
//!
//! ```text
//! perfect
//! halfspace:eps=<real>          halfspace:file=<eps table>[,tail=drude|none]
//! drude:wp=<w>,gamma=<w>        plasma:wp=<w>
//! stack:file=<stack file>       table:file=<reflection table>[,outside=error|clamp]
//! ```
//!
//! A stack file lists layers from the cavity side outwards:
//!
//! ```text
//! # thickness in the length unit, then a medium
//! layer 5e-8 drude:wp=1.37e16,gamma=5.3e13
//! layer 1e-6 eps=2.1
//! substrate eps=11.7
//! ```
//!
//! Frequencies and thicknesses are in the active units.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use cavity_casimir::mirrors::{Layer, OutOfRange, PermittivityTail, ReflectionTable, Stack, TabulatedPermittivity};
use cavity_casimir::{MirrorModel, PermittivityModel};
use num_complex::Complex64;

use crate::error::{CliError, CliResult};
use crate::settings::{number, Sourced};
use crate::units::Units;

fn options(body: &str) -> Result<BTreeMap<&str, &str>, String> {
    let mut map = BTreeMap::new();
    if body.is_empty() {
        return Ok(map);
    }
    for part in body.split(',') {
        let (k, v) = part.split_once('=').ok_or_else(|| format!("expected key=value, got `{part}`"))?;
        if map.insert(k.trim(), v.trim()).is_some() {
            return Err(format!("`{}` given twice", k.trim()));
        }
    }
    Ok(map)
}

struct Opts<'a> {
    kind: &'a str,
    map: BTreeMap<&'a str, &'a str>,
}

impl<'a> Opts<'a> {
    fn take(&mut self, key: &str) -> Option<&'a str> {
        self.map.remove(key)
    }

    fn need(&mut self, key: &str) -> Result<&'a str, String> {
        self.take(key).ok_or_else(|| format!("`{}` needs `{key}=`", self.kind))
    }

    fn done(self) -> Result<(), String> {
        match self.map.keys().next() {
            Some(k) => Err(format!("`{}` does not take `{k}`", self.kind)),
            None => Ok(()),
        }
    }
}

fn split(spec: &str) -> Result<Opts<'_>, String> {
    let (kind, body) = spec.split_once(':').unwrap_or((spec, ""));
    Ok(Opts { kind: kind.trim(), map: options(body)? })
}

fn frequency(units: Units, s: &str) -> Result<f64, String> {
    Ok(units.frequency_to_si(number(s)?))
}

/// A bulk medium, shared by half-space specs and stack files.
fn medium(kind: &str, mut o: Opts<'_>, units: Units, base: &dyn Fn(&str) -> std::path::PathBuf) -> Result<PermittivityModel, String> {
    let m = match kind {
        "halfspace" if o.map.contains_key("eps") => {
            let eps = number(o.need("eps")?)?;
            if eps <= 0.0 {
                return Err(format!("eps must be positive, got {eps}"));
            }
            PermittivityModel::Constant(Complex64::new(eps, 0.0))
        }
        "halfspace" => {
            let file = o.take("file").ok_or("`halfspace` needs `eps=` or `file=`")?;
            let tail = match o.take("tail").unwrap_or("drude") {
                "drude" => PermittivityTail::DrudeAsymptote(None),
                "none" => PermittivityTail::None,
                t => return Err(format!("tail must be `drude` or `none`, got `{t}`")),
            };
            let table = TabulatedPermittivity::from_path(base(file), tail).map_err(|e| e.to_string())?;
            PermittivityModel::Tabulated(Arc::new(table))
        }
        "drude" => {
            let wp = frequency(units, o.need("wp")?)?;
            let gamma = frequency(units, o.need("gamma")?)?;
            PermittivityModel::drude(wp, gamma).map_err(|e| e.to_string())?
        }
        "plasma" => PermittivityModel::plasma(frequency(units, o.need("wp")?)?).map_err(|e| e.to_string())?,
        other => return Err(format!("unknown medium `{other}`")),
    };
    o.done()?;
    Ok(m)
}

/// Parse one `--mirror` value.
pub fn parse_mirror(src: &Sourced, units: Units) -> CliResult<MirrorModel> {
    let base = |f: &str| src.resolve(f);
    let spec = src.value.trim();
    let mut o = split(spec).map_err(|m| src.error(m))?;
    let model = match o.kind {
        "perfect" => {
            o.done().map_err(|m| src.error(m))?;
            MirrorModel::Perfect
        }
        "halfspace" | "drude" | "plasma" => {
            let kind = o.kind;
            MirrorModel::HalfSpace(medium(kind, o, units, &base).map_err(|m| src.error(m))?)
        }
        "stack" => {
            let file = o.need("file").map_err(|m| src.error(m))?;
            o.done().map_err(|m| src.error(m))?;
            MirrorModel::Stack(load_stack(&base(file), units)?)
        }
        "table" => {
            let file = o.need("file").map_err(|m| src.error(m))?;
            let outside = match o.take("outside").unwrap_or("error") {
                "error" => OutOfRange::Error,
                "clamp" => OutOfRange::ClampToEdge,
                t => return Err(src.error(format!("outside must be `error` or `clamp`, got `{t}`"))),
            };
            o.done().map_err(|m| src.error(m))?;
            MirrorModel::Tabulated(Arc::new(ReflectionTable::from_path(base(file), outside)?))
        }
        other => {
            return Err(src.error(format!(
                "unknown mirror `{other}` (expected perfect, halfspace, drude, plasma, stack or table)"
            )))
        }
    };
    Ok(model)
}

pub fn load_stack(path: &Path, units: Units) -> CliResult<Stack> {
    let text = fs::read_to_string(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    parse_stack(&text, path, units)
}

pub fn parse_stack(text: &str, path: &Path, units: Units) -> CliResult<Stack> {
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let base = |f: &str| if Path::new(f).is_relative() { dir.join(f) } else { f.into() };
    let mut layers = Vec::new();
    let mut substrate = None;
    let mut substrate_line = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |m: String| CliError::config(format!("{}:{line}: {m}", path.display()));
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if substrate_line.is_some() {
            return Err(err("nothing may follow the substrate".into()));
        }
        let mut words = content.split_whitespace();
        let what = words.next().unwrap_or("");
        let parse_medium = |spec: Option<&str>| -> Result<PermittivityModel, String> {
            let spec = spec.ok_or("missing medium")?;
            let spec = if spec.starts_with("eps=") { format!("halfspace:{spec}") } else { spec.to_string() };
            let o = split(&spec)?;
            medium(o.kind, Opts { kind: o.kind, map: o.map }, units, &base)
        };
        match what {
            "layer" => {
                let thickness = words.next().ok_or("missing thickness").map_err(|m| err(m.into()))?;
                let thickness = units.length_to_si(number(thickness).map_err(err)?);
                if thickness <= 0.0 {
                    return Err(err(format!("thickness must be positive, got {thickness}")));
                }
                let m = parse_medium(words.next()).map_err(err)?;
                layers.push(Layer { medium: m, thickness });
            }
            "substrate" => {
                substrate = Some(parse_medium(words.next()).map_err(err)?);
                substrate_line = Some(line);
            }
            other => return Err(err(format!("expected `layer` or `substrate`, got `{other}`"))),
        }
        if let Some(extra) = words.next() {
            return Err(err(format!("unexpected `{extra}`")));
        }
    }
    if layers.is_empty() && substrate.is_none() {
        return Err(CliError::config(format!("{}: no layers", path.display())));
    }
    Ok(Stack::new(layers, substrate)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn src(s: &str) -> Sourced {
        Sourced { value: s.into(), origin: "--mirror1".into(), base: None }
    }

    #[test]
    fn mirror_specs() {
        assert_eq!(parse_mirror(&src("perfect"), Units::Si).unwrap(), MirrorModel::Perfect);
        let d = parse_mirror(&src("drude:wp=1.37e16,gamma=5.3e13"), Units::Si).unwrap();
        assert_eq!(d, MirrorModel::HalfSpace(PermittivityModel::Drude { plasma: 1.37e16, damping: 5.3e13 }));
        let h = parse_mirror(&src("halfspace:eps=10"), Units::Si).unwrap();
        assert_eq!(h, MirrorModel::HalfSpace(PermittivityModel::Constant(Complex64::new(10.0, 0.0))));
        let n = parse_mirror(&src("plasma:wp=2"), Units::Natural { length: 1e-6 }).unwrap();
        let MirrorModel::HalfSpace(PermittivityModel::Plasma { plasma }) = n else { panic!() };
        assert!((plasma - 2.0 * 299_792_458.0 / 1e-6).abs() < 1.0);
        for bad in ["mirror", "drude:wp=1", "plasma:wp=1,gamma=2", "halfspace:eps=-1", "perfect:x=1"] {
            let e = parse_mirror(&src(bad), Units::Si).unwrap_err();
            assert!(e.to_string().starts_with("--mirror1:"), "{e}");
        }
    }

    #[test]
    fn stack_file() {
        let text = "# gold film on silicon\nlayer 5e-8 drude:wp=1.37e16,gamma=5.3e13\n\nsubstrate eps=11.7\n";
        let s = parse_stack(text, Path::new("s.txt"), Units::Si).unwrap();
        assert_eq!(s.layers.len(), 1);
        assert!(s.substrate.is_some());
        let e = parse_stack("layer 1e-8 eps=2\nlayer -1 eps=2\n", Path::new("s.txt"), Units::Si).unwrap_err();
        assert!(e.to_string().starts_with("s.txt:2:"), "{e}");
        let e = parse_stack("layer 1e-8 glass\n", Path::new("s.txt"), Units::Si).unwrap_err();
        assert!(e.to_string().contains("s.txt:1:"), "{e}");
    }
}
