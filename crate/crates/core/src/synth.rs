//! Seeded generator for labeled multi-class motion sequences.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::path::Path;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forest::derive_seed;
use crate::motion::{JointSequence, Role, SkeletonSpec, Vec3};

pub const DEFAULT_NOISE_SIGMA: f64 = 0.005;
pub const MIN_PER_STYLE: usize = 3;

/// Sinusoid `amplitude * sin(2π f t + phase) * axis` added to each listed joint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Oscillator {
    pub joints: Vec<Role>,
    pub amplitude: f64,
    pub frequency: f64,
    #[serde(default)]
    pub phase: f64,
    pub axis: Vec3,
}

/// Every `period` seconds the motion holds still for the first
/// `duty * period` seconds, then resumes where it stopped.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PausePattern {
    pub period: f64,
    pub duty: f64,
}

/// Every `period` seconds oscillator amplitudes swell by up to `gain`
/// along a raised-cosine bump lasting `width` seconds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BurstPattern {
    pub period: f64,
    pub gain: f64,
    pub width: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StyleSpec {
    pub name: String,
    pub base_pose: BTreeMap<Role, Vec3>,
    #[serde(default)]
    pub oscillators: Vec<Oscillator>,
    #[serde(default)]
    pub pause_pattern: Option<PausePattern>,
    #[serde(default)]
    pub burst_pattern: Option<BurstPattern>,
    #[serde(default = "default_noise")]
    pub noise_sigma: f64,
    /// Per-sequence body scale is drawn from `1 ± scale_jitter`.
    #[serde(default)]
    pub scale_jitter: f64,
    /// Per-sequence, per-oscillator phase offset drawn from `±phase_jitter`.
    #[serde(default)]
    pub phase_jitter: f64,
    /// Per-sequence relative frequency change drawn from `±frequency_jitter`.
    #[serde(default)]
    pub frequency_jitter: f64,
}

fn default_noise() -> f64 {
    DEFAULT_NOISE_SIGMA
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidArgument(msg()))
    }
}

fn nonneg(v: f64) -> bool {
    v.is_finite() && v >= 0.0
}

impl StyleSpec {
    pub fn validate(&self) -> Result<()> {
        let name = &self.name;
        check(!name.is_empty(), || "style name is empty".into())?;
        for role in Role::CANONICAL {
            let p = self.base_pose.get(&role);
            check(p.is_some_and(|p| p.iter().all(|v| v.is_finite())), || {
                format!("style {name}: base pose lacks a finite {role}")
            })?;
        }
        for (i, o) in self.oscillators.iter().enumerate() {
            check(nonneg(o.amplitude), || {
                format!("style {name}: oscillator {i} amplitude must be >= 0")
            })?;
            check(nonneg(o.frequency), || {
                format!("style {name}: oscillator {i} frequency must be >= 0")
            })?;
            check(
                o.phase.is_finite() && o.axis.iter().all(|v| v.is_finite()),
                || format!("style {name}: oscillator {i} has non-finite phase or axis"),
            )?;
            check(!o.joints.is_empty(), || {
                format!("style {name}: oscillator {i} moves no joints")
            })?;
            for r in &o.joints {
                check(self.base_pose.contains_key(r), || {
                    format!("style {name}: oscillator {i} targets {r}, which has no base position")
                })?;
            }
        }
        if let Some(p) = self.pause_pattern {
            check(p.period.is_finite() && p.period > 0.0, || {
                format!("style {name}: pause period must be > 0")
            })?;
            check((0.0..=1.0).contains(&p.duty), || {
                format!("style {name}: duty cycle must lie in [0, 1]")
            })?;
        }
        if let Some(b) = self.burst_pattern {
            check(b.period.is_finite() && b.period > 0.0, || {
                format!("style {name}: burst period must be > 0")
            })?;
            check(nonneg(b.gain), || {
                format!("style {name}: burst gain must be >= 0")
            })?;
            check(
                b.width.is_finite() && b.width > 0.0 && b.width <= b.period,
                || format!("style {name}: burst width must lie in (0, period]"),
            )?;
        }
        check(nonneg(self.noise_sigma), || {
            format!("style {name}: noise_sigma must be >= 0")
        })?;
        check(nonneg(self.scale_jitter) && self.scale_jitter < 1.0, || {
            format!("style {name}: scale_jitter must lie in [0, 1)")
        })?;
        check(nonneg(self.phase_jitter), || {
            format!("style {name}: phase_jitter must be >= 0")
        })?;
        check(
            nonneg(self.frequency_jitter) && self.frequency_jitter < 1.0,
            || format!("style {name}: frequency_jitter must lie in [0, 1)"),
        )
    }

    /// Oscillator clock at wall time `t`; constant during pauses.
    pub fn motion_time(&self, t: f64) -> f64 {
        match self.pause_pattern {
            None => t,
            Some(p) => {
                let hold = p.duty * p.period;
                let cycles = (t / p.period).floor();
                let into = t - cycles * p.period;
                cycles * (p.period - hold) + (into - hold).max(0.0)
            }
        }
    }

    /// Amplitude multiplier at wall time `t`.
    pub fn burst_gain(&self, t: f64) -> f64 {
        match self.burst_pattern {
            None => 1.0,
            Some(b) => {
                let s = (t - (t / b.period).floor() * b.period) / b.width;
                if s < 1.0 {
                    1.0 + (b.gain - 1.0) * 0.5 * (1.0 - (TAU * s).cos())
                } else {
                    1.0
                }
            }
        }
    }

    /// Noise-free position of `role` at wall time `t` with no per-sequence
    /// variation applied.
    pub fn analytic_position(&self, role: Role, t: f64) -> Vec3 {
        let draw = Draw::neutral(self.oscillators.len());
        self.position(role, t, &draw)
    }

    fn position(&self, role: Role, t: f64, draw: &Draw) -> Vec3 {
        let base = self.base_pose[&role];
        let mut p = [
            base[0] * draw.scale,
            base[1] * draw.scale,
            base[2] * draw.scale,
        ];
        let tau = self.motion_time(t);
        let gain = self.burst_gain(t);
        for (k, o) in self.oscillators.iter().enumerate() {
            if !o.joints.contains(&role) {
                continue;
            }
            let f = o.frequency * draw.freq;
            let s = gain * o.amplitude * (TAU * f * tau + o.phase + draw.phase[k]).sin();
            for (c, a) in p.iter_mut().zip(o.axis) {
                *c += s * a;
            }
        }
        p
    }
}

/// Per-sequence random variation.
struct Draw {
    scale: f64,
    freq: f64,
    phase: Vec<f64>,
}

impl Draw {
    fn neutral(n: usize) -> Self {
        Self {
            scale: 1.0,
            freq: 1.0,
            phase: vec![0.0; n],
        }
    }

    fn sample(spec: &StyleSpec, rng: &mut ChaCha8Rng) -> Self {
        let mut sym = |h: f64| {
            if h > 0.0 {
                rng.random_range(-h..=h)
            } else {
                0.0
            }
        };
        let scale = 1.0 + sym(spec.scale_jitter);
        let freq = 1.0 + sym(spec.frequency_jitter);
        let phase = (0..spec.oscillators.len())
            .map(|_| sym(spec.phase_jitter))
            .collect();
        Self { scale, freq, phase }
    }
}

/// Generates `duration * fps` frames (rounded) of the style on the canonical
/// skeleton. The group id defaults to the style name.
pub fn generate(spec: &StyleSpec, duration: f64, fps: f64, seed: u64) -> Result<JointSequence> {
    generate_with_group(spec, duration, fps, seed, spec.name.clone())
}

fn generate_with_group(
    spec: &StyleSpec,
    duration: f64,
    fps: f64,
    seed: u64,
    group_id: String,
) -> Result<JointSequence> {
    spec.validate()?;
    check(fps.is_finite() && fps > 0.0, || {
        format!("fps must be > 0, got {fps}")
    })?;
    check(duration.is_finite() && duration > 0.0, || {
        format!("duration must be > 0, got {duration}")
    })?;
    let frames = (duration * fps).round() as usize;
    if frames < 2 {
        return Err(Error::TooShort {
            found: frames,
            required: 2,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = Draw::sample(spec, &mut rng);
    let noise = if spec.noise_sigma > 0.0 {
        Some(
            Normal::new(0.0, spec.noise_sigma)
                .map_err(|e| Error::InvalidArgument(e.to_string()))?,
        )
    } else {
        None
    };
    let mut positions = Vec::with_capacity(frames * Role::CANONICAL.len());
    for t in 0..frames {
        let time = t as f64 / fps;
        for role in Role::CANONICAL {
            let mut p = spec.position(role, time, &draw);
            if let Some(n) = &noise {
                for c in p.iter_mut() {
                    *c += n.sample(&mut rng);
                }
            }
            positions.push(p);
        }
    }
    JointSequence::from_flat(
        fps,
        positions,
        frames,
        Arc::new(SkeletonSpec::canonical()),
        Some(spec.name.clone()),
        group_id,
    )
}

/// `per_style` sequences per spec, in spec order. Group ids are
/// `"{name}-{index:02}"` and every sequence has its own derived seed.
pub fn generate_corpus(
    specs: &[StyleSpec],
    per_style: usize,
    duration: f64,
    fps: f64,
    master_seed: u64,
) -> Result<Vec<JointSequence>> {
    if per_style < MIN_PER_STYLE {
        return Err(Error::InvalidArgument(format!(
            "per_style must be >= {MIN_PER_STYLE}, got {per_style}"
        )));
    }
    if specs.is_empty() {
        return Err(Error::InvalidArgument("no style specs given".into()));
    }
    let mut names: Vec<&str> = specs.iter().map(|s| s.name.as_str()).collect();
    names.sort_unstable();
    if names.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidArgument(
            "style names must be distinct".into(),
        ));
    }
    let jobs: Vec<(usize, usize)> = (0..specs.len())
        .flat_map(|s| (0..per_style).map(move |i| (s, i)))
        .collect();
    jobs.into_par_iter()
        .map(|(s, i)| {
            let seed = derive_seed(master_seed, (s * per_style + i) as u64);
            let group = format!("{}-{i:02}", specs[s].name);
            generate_with_group(&specs[s], duration, fps, seed, group)
        })
        .collect()
}

/// A named collection of styles, stored as TOML.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StyleBundle {
    pub styles: Vec<StyleSpec>,
}

impl StyleBundle {
    pub fn from_toml(text: &str) -> Result<Self> {
        let bundle: Self = toml::from_str(text).map_err(|e| Error::Parse {
            line: e
                .span()
                .map(|s| text[..s.start].lines().count().max(1))
                .unwrap_or(0),
            message: e.message().to_string(),
        })?;
        for s in &bundle.styles {
            s.validate()?;
        }
        Ok(bundle)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::InvalidArgument(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_toml()?).map_err(|e| Error::io(path, e))
    }
}

pub fn standing_pose() -> BTreeMap<Role, Vec3> {
    use Role::*;
    BTreeMap::from([
        (Head, [0.0, 1.65, 0.0]),
        (LeftShoulder, [-0.18, 1.45, 0.0]),
        (RightShoulder, [0.18, 1.45, 0.0]),
        (LeftHand, [-0.25, 0.85, 0.05]),
        (RightHand, [0.25, 0.85, 0.05]),
        (Torso, [0.0, 1.2, 0.0]),
        (Pelvis, [0.0, 0.95, 0.0]),
        (LeftKnee, [-0.1, 0.5, 0.03]),
        (RightKnee, [0.1, 0.5, 0.03]),
        (LeftAnkle, [-0.1, 0.09, 0.0]),
        (RightAnkle, [0.1, 0.09, 0.0]),
        (LeftFoot, [-0.1, 0.03, 0.12]),
        (RightFoot, [0.1, 0.03, 0.12]),
    ])
}

const X: Vec3 = [1.0, 0.0, 0.0];
const Y: Vec3 = [0.0, 1.0, 0.0];
const Z: Vec3 = [0.0, 0.0, 1.0];

fn osc(joints: &[Role], amplitude: f64, frequency: f64, phase: f64, axis: Vec3) -> Oscillator {
    Oscillator {
        joints: joints.to_vec(),
        amplitude,
        frequency,
        phase,
        axis,
    }
}

fn style(name: &str, oscillators: Vec<Oscillator>) -> StyleSpec {
    StyleSpec {
        name: name.into(),
        base_pose: standing_pose(),
        oscillators,
        pause_pattern: None,
        burst_pattern: None,
        noise_sigma: DEFAULT_NOISE_SIGMA,
        scale_jitter: 0.0,
        phase_jitter: PI,
        frequency_jitter: 0.05,
    }
}

/// Ten shipped styles. The burst and lock pairs move at matching speeds
/// and differ in tempo and reach, so telling them apart takes more than a
/// few frames of context.
pub fn default_styles() -> Vec<StyleSpec> {
    use Role::*;
    const HANDS: &[Role] = &[LeftHand, RightHand];
    const BODY: &[Role] = &Role::CANONICAL;
    const UPPER: &[Role] = &[
        Head,
        LeftShoulder,
        RightShoulder,
        LeftHand,
        RightHand,
        Torso,
    ];

    let pump = |a: f64, f: f64| {
        vec![
            osc(HANDS, a, f, 0.0, Y),
            osc(HANDS, a / 2.0, f, PI / 2.0, Z),
        ]
    };
    let mut burst_fast = style("burst-fast", pump(0.08, 2.5));
    burst_fast.burst_pattern = Some(BurstPattern {
        period: 0.8,
        gain: 3.0,
        width: 0.3,
    });
    let mut burst_slow = style("burst-slow", pump(0.16, 1.25));
    burst_slow.burst_pattern = Some(BurstPattern {
        period: 1.6,
        gain: 3.0,
        width: 0.6,
    });

    let lock = |a: f64, f: f64| {
        vec![
            osc(HANDS, a, f, 0.0, Y),
            osc(&[LeftHand], 0.6 * a, f, 0.0, X),
            osc(&[RightHand], 0.6 * a, f, PI, X),
        ]
    };
    let mut lock_short = style("lock-short", lock(0.15, 2.0));
    lock_short.pause_pattern = Some(PausePattern {
        period: 1.0,
        duty: 0.3,
    });
    let mut lock_long = style("lock-long", lock(0.3, 1.0));
    lock_long.pause_pattern = Some(PausePattern {
        period: 2.0,
        duty: 0.3,
    });

    let sway = |f: f64| vec![osc(BODY, 0.08, f, 0.0, X), osc(HANDS, 0.15, f, PI / 2.0, Z)];
    let slow_sway = style("sway-slow", sway(0.5));
    let quick_sway = style("sway-quick", sway(1.1));
    let bounce = style(
        "smooth-bounce",
        vec![
            osc(UPPER, 0.05, 2.0, 0.0, Y),
            osc(&[Pelvis, LeftKnee, RightKnee], 0.05, 2.0, 0.0, Y),
            osc(&[LeftKnee, RightKnee], 0.04, 2.0, 0.0, Z),
        ],
    );
    let wide_arms = style(
        "wide-arms",
        vec![
            osc(&[LeftHand], 0.4, 0.8, 0.0, [-1.0, 1.0, 0.0]),
            osc(&[RightHand], 0.4, 0.8, 0.0, [1.0, 1.0, 0.0]),
        ],
    );
    let erratic_osc = vec![
        osc(&[LeftHand], 0.15, 0.7, 0.0, [0.3, 1.0, 0.2]),
        osc(&[RightHand], 0.12, 1.9, 0.0, [1.0, 0.2, 0.5]),
        osc(&[LeftFoot, LeftAnkle], 0.08, 3.1, 0.0, Z),
        osc(&[Head], 0.05, 2.3, 0.0, X),
        osc(BODY, 0.04, 0.3, 0.0, Z),
    ];
    let erratic = style("erratic", erratic_osc.clone());
    let mut erratic_burst = style("erratic-burst", erratic_osc);
    erratic_burst.burst_pattern = Some(BurstPattern {
        period: 1.0,
        gain: 2.0,
        width: 0.4,
    });

    vec![
        burst_fast,
        burst_slow,
        lock_short,
        lock_long,
        slow_sway,
        quick_sway,
        bounce,
        wide_arms,
        erratic,
        erratic_burst,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::derivative;

    fn single_hand(amplitude: f64, frequency: f64) -> StyleSpec {
        let mut s = style(
            "one",
            vec![osc(&[Role::RightHand], amplitude, frequency, 0.3, X)],
        );
        s.noise_sigma = 0.0;
        s.scale_jitter = 0.0;
        s.phase_jitter = 0.0;
        s.frequency_jitter = 0.0;
        s
    }

    #[test]
    fn noiseless_tracks_match_analytic_sum() {
        let s = single_hand(0.2, 1.3);
        let seq = generate(&s, 3.0, 60.0, 5).unwrap();
        let j = seq.skeleton().index(Role::RightHand).unwrap();
        for t in 0..seq.frame_count() {
            let time = t as f64 / 60.0;
            let want = s.base_pose[&Role::RightHand][0] + 0.2 * (TAU * 1.3 * time + 0.3).sin();
            assert!((seq.position(t, j)[0] - want).abs() < 1e-9);
        }
    }

    #[test]
    fn peak_speed_matches_analytic() {
        for f in [0.5, 1.0, 2.0] {
            let a = 0.3;
            let s = single_hand(a, f);
            let seq = generate(&s, 4.0, 60.0, 0).unwrap();
            let track = seq.role_track(Role::RightHand).unwrap();
            let v = derivative(&track, 1, seq.dt()).unwrap();
            let peak = v.magnitudes().into_iter().fold(0.0, f64::max);
            let want = TAU * f * a;
            assert!((peak - want).abs() / want < 0.02, "{peak} vs {want}");
        }
    }

    #[test]
    fn pauses_freeze_motion() {
        let mut s = single_hand(0.2, 1.0);
        s.pause_pattern = Some(PausePattern {
            period: 1.0,
            duty: 0.5,
        });
        let seq = generate(&s, 3.0, 60.0, 0).unwrap();
        let track = seq.role_track(Role::RightHand).unwrap();
        let v = derivative(&track, 1, seq.dt()).unwrap();
        // frames 0..=30 of each second are held; skip stencil reach at edges
        for cycle in 0..3 {
            for t in cycle * 60 + 2..=cycle * 60 + 28 {
                assert!(v.magnitudes()[t] < 1e-9, "frame {t}");
            }
        }
    }

    #[test]
    fn stationary_without_oscillators() {
        let s = single_hand(0.0, 1.0);
        let seq = generate(&s, 1.0, 60.0, 0).unwrap();
        assert_eq!(seq.frame(0), seq.frame(59));
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        let s = &default_styles()[0];
        let a = generate(s, 1.0, 60.0, 9).unwrap();
        let b = generate(s, 1.0, 60.0, 9).unwrap();
        let c = generate(s, 1.0, 60.0, 10).unwrap();
        assert_eq!(a.positions(), b.positions());
        assert_ne!(a.positions(), c.positions());
    }

    #[test]
    fn corpus_structure() {
        let specs = default_styles();
        let a = generate_corpus(&specs, 3, 0.5, 60.0, 1).unwrap();
        let b = generate_corpus(&specs, 3, 0.5, 60.0, 2).unwrap();
        assert_eq!(a.len(), 30);
        let mut groups: Vec<&str> = a.iter().map(|s| s.group_id.as_str()).collect();
        groups.sort_unstable();
        groups.dedup();
        assert_eq!(groups.len(), 30);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.label, y.label);
            assert_eq!(x.group_id, y.group_id);
            assert_ne!(x.positions(), y.positions());
        }
        assert!(generate_corpus(&specs, 2, 0.5, 60.0, 1).is_err());
    }

    #[test]
    fn bundle_round_trip() {
        let bundle = StyleBundle {
            styles: default_styles(),
        };
        let text = bundle.to_toml().unwrap();
        assert_eq!(StyleBundle::from_toml(&text).unwrap(), bundle);
    }

    #[test]
    fn invalid_specs() {
        let mut s = single_hand(0.1, 1.0);
        s.oscillators[0].frequency = -1.0;
        assert!(s.validate().is_err());
        let mut s = single_hand(0.1, 1.0);
        s.pause_pattern = Some(PausePattern {
            period: 1.0,
            duty: 1.5,
        });
        assert!(s.validate().is_err());
        let mut s = single_hand(0.1, 1.0);
        s.base_pose.remove(&Role::Pelvis);
        assert!(s.validate().is_err());
    }
}
