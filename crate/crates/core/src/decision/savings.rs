use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Target and proposed bitrates for the GOPs of one video.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VideoBitrates {
    pub video: String,
    pub targets: Vec<f64>,
    pub proposed: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VideoSavings {
    pub video: String,
    pub rows: Vec<(f64, f64)>,
    pub total_target: f64,
    pub total_proposed: f64,
    pub saving_percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SavingsReport {
    pub videos: Vec<VideoSavings>,
    pub total_target: f64,
    pub total_proposed: f64,
    pub saving_percent: f64,
}

/// Saving is `(Σtarget − Σproposed) / Σtarget × 100`, per video and overall.
pub fn savings_report(videos: &[VideoBitrates]) -> Result<SavingsReport> {
    if videos.is_empty() || videos.iter().all(|v| v.targets.is_empty()) {
        return Err(Error::input("savings report needs at least one GOP"));
    }
    let mut out = Vec::with_capacity(videos.len());
    for v in videos {
        if v.targets.len() != v.proposed.len() {
            return Err(Error::input(format!(
                "video {}: {} targets but {} proposals",
                v.video,
                v.targets.len(),
                v.proposed.len()
            )));
        }
        let rows: Vec<(f64, f64)> = v.targets.iter().copied().zip(v.proposed.iter().copied()).collect();
        for (i, &(t, p)) in rows.iter().enumerate() {
            if !(t.is_finite() && p.is_finite() && t > 0.0 && p > 0.0) {
                return Err(Error::input(format!(
                    "video {} GOP {}: bitrates must be positive, got ({t}, {p})",
                    v.video,
                    i + 1
                )));
            }
            if p > t {
                return Err(Error::input(format!(
                    "video {} GOP {}: proposed {p} exceeds target {t}",
                    v.video,
                    i + 1
                )));
            }
        }
        let total_target: f64 = rows.iter().map(|r| r.0).sum();
        let total_proposed: f64 = rows.iter().map(|r| r.1).sum();
        out.push(VideoSavings {
            video: v.video.clone(),
            saving_percent: saving(total_target, total_proposed),
            rows,
            total_target,
            total_proposed,
        });
    }
    let total_target: f64 = out.iter().map(|v| v.total_target).sum();
    let total_proposed: f64 = out.iter().map(|v| v.total_proposed).sum();
    Ok(SavingsReport {
        videos: out,
        total_target,
        total_proposed,
        saving_percent: saving(total_target, total_proposed),
    })
}

fn saving(target: f64, proposed: f64) -> f64 {
    if target > 0.0 {
        (target - proposed) / target * 100.0
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn totals_and_percent() {
        let r = savings_report(&[
            VideoBitrates { video: "a".into(), targets: vec![3.0, 3.0], proposed: vec![1.5, 3.0] },
            VideoBitrates { video: "b".into(), targets: vec![], proposed: vec![] },
        ])
        .unwrap();
        assert_eq!(r.videos[0].total_target, 6.0);
        assert_eq!(r.videos[0].total_proposed, 4.5);
        assert!((r.videos[0].saving_percent - 25.0).abs() < 1e-12);
        assert_eq!(r.videos[1].saving_percent, 0.0);
        assert!((r.saving_percent - 25.0).abs() < 1e-12);
    }

    #[test]
    fn input_errors() {
        assert!(savings_report(&[]).is_err());
        let mismatched = VideoBitrates { video: "a".into(), targets: vec![1.0], proposed: vec![] };
        assert!(savings_report(&[mismatched]).is_err());
        let above = VideoBitrates { video: "a".into(), targets: vec![1.0], proposed: vec![2.0] };
        assert!(savings_report(&[above]).is_err());
        let zero = VideoBitrates { video: "a".into(), targets: vec![1.0], proposed: vec![0.0] };
        assert!(savings_report(&[zero]).is_err());
    }
}
