use alloc::collections::BTreeMap;
use alloc::vec::Vec;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scores {
    pub rand_index: f64,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ScoreError {
    #[error("partitions label {predicted} and {truth} nodes")]
    SizeMismatch { predicted: usize, truth: usize },
}

fn dense<L: Ord + Copy>(labels: &[L]) -> (Vec<usize>, usize) {
    let mut ids = BTreeMap::new();
    let dense = labels
        .iter()
        .map(|l| {
            let next = ids.len();
            *ids.entry(*l).or_insert(next)
        })
        .collect();
    (dense, ids.len())
}

fn pairs(n: usize) -> f64 {
    (n as f64) * (n as f64 - 1.0) / 2.0
}

/// Rand index over node pairs, and precision / recall / F-measure of a
/// greedy one-to-one matching between predicted and true classes.
///
/// The matching repeatedly takes the (predicted, true) class pair with the
/// largest overlap among unmatched classes. Precision averages
/// `|P ∩ G| / |P|` and recall `|P ∩ G| / |G|` over matched pairs.
pub fn score_partition<L: Ord + Copy>(predicted: &[L], truth: &[L]) -> Result<Scores, ScoreError> {
    if predicted.len() != truth.len() {
        return Err(ScoreError::SizeMismatch {
            predicted: predicted.len(),
            truth: truth.len(),
        });
    }
    let n = predicted.len();
    let (p, np) = dense(predicted);
    let (g, ng) = dense(truth);
    let mut overlap: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut p_size = alloc::vec![0usize; np];
    let mut g_size = alloc::vec![0usize; ng];
    for v in 0..n {
        *overlap.entry((p[v], g[v])).or_default() += 1;
        p_size[p[v]] += 1;
        g_size[g[v]] += 1;
    }

    let rand_index = if n < 2 {
        1.0
    } else {
        let same_both: f64 = overlap.values().map(|&c| pairs(c)).sum();
        let same_p: f64 = p_size.iter().map(|&c| pairs(c)).sum();
        let same_g: f64 = g_size.iter().map(|&c| pairs(c)).sum();
        let disagree = same_p + same_g - 2.0 * same_both;
        1.0 - disagree / pairs(n)
    };

    let mut cells: Vec<((usize, usize), usize)> = overlap.into_iter().collect();
    cells.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut p_used = alloc::vec![false; np];
    let mut g_used = alloc::vec![false; ng];
    let (mut precision, mut recall, mut matched) = (0.0, 0.0, 0usize);
    for ((pi, gi), c) in cells {
        if p_used[pi] || g_used[gi] {
            continue;
        }
        p_used[pi] = true;
        g_used[gi] = true;
        precision += c as f64 / p_size[pi] as f64;
        recall += c as f64 / g_size[gi] as f64;
        matched += 1;
    }
    let (precision, recall) = if matched == 0 {
        (1.0, 1.0)
    } else {
        (precision / matched as f64, recall / matched as f64)
    };
    let f_measure = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Ok(Scores {
        rand_index,
        precision,
        recall,
        f_measure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical() {
        let s = score_partition(&[3, 3, 1, 1, 2], &[0, 0, 5, 5, 7]).unwrap();
        assert_eq!(
            s,
            Scores {
                rand_index: 1.0,
                precision: 1.0,
                recall: 1.0,
                f_measure: 1.0
            }
        );
    }

    #[test]
    fn one_class_against_two() {
        let s = score_partition(&[0; 6], &[0, 0, 0, 1, 1, 1]).unwrap();
        assert_eq!(s.recall, 1.0);
        assert_eq!(s.precision, 0.5);
        assert!((s.f_measure - 2.0 / 3.0).abs() < 1e-15);
        // 6 of 15 pairs agree
        assert!((s.rand_index - 0.4).abs() < 1e-15);
    }

    #[test]
    fn size_mismatch() {
        assert!(score_partition(&[0, 1], &[0]).is_err());
    }
}
