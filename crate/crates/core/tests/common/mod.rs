//! Generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use nonsig::strategy::pr_box;
use nonsig::{builtin_game, Game, Strategy};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// All tuples of the product of `radices`, player 0 most significant.
pub fn tuples(radices: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &r in radices {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..r).map(move |x| {
                    let mut t = t.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
    }
    out
}

pub fn index_of(radices: &[usize], t: &[usize]) -> usize {
    t.iter().zip(radices).fold(0, |acc, (&x, &r)| acc * r + x)
}

pub fn random_dist(rng: &mut ChaCha8Rng, len: usize, zeros: bool) -> Vec<f64> {
    let mut w: Vec<f64> = (0..len).map(|_| rng.random::<f64>() + 0.05).collect();
    if zeros {
        // Keep at least one tuple in the support.
        for x in w.iter_mut().skip(1) {
            if rng.random::<f64>() < 0.4 {
                *x = 0.0;
            }
        }
    }
    let s: f64 = w.iter().sum();
    w.iter().map(|x| x / s).collect()
}

pub fn random_game(rng: &mut ChaCha8Rng, qa: &[usize], aa: &[usize], zeros: bool) -> Game {
    let len: usize = qa.iter().product();
    let dist = random_dist(rng, len, zeros);
    let p = 0.3 + 0.5 * rng.random::<f64>();
    Game::new(qa.to_vec(), aa.to_vec(), dist, |_, _| rng.random::<f64>() < p).unwrap()
}

/// Random alphabet sizes in `2..=max` for `players` players.
pub fn random_shape(rng: &mut ChaCha8Rng, players: usize, max: usize) -> (Vec<usize>, Vec<usize>) {
    let qa = (0..players).map(|_| rng.random_range(2..=max)).collect();
    let aa = (0..players).map(|_| rng.random_range(2..=max)).collect();
    (qa, aa)
}

/// chsh, gyni2 and `count` random complete-support games: two-player with alphabets up to 3,
/// three-player with question alphabets up to 3 and binary answers.
pub fn corpus(seed: u64, count: usize) -> Vec<(String, Game)> {
    let mut r = rng(seed);
    let mut out = vec![
        ("chsh".to_string(), builtin_game("chsh").unwrap()),
        ("gyni2".to_string(), builtin_game("gyni2").unwrap()),
    ];
    for k in 0..count {
        let (qa, aa) = if k % 2 == 0 {
            random_shape(&mut r, 2, 3)
        } else {
            let qa: Vec<usize> = (0..3).map(|_| r.random_range(2..=3)).collect();
            (qa, vec![2, 2, 2])
        };
        let g = random_game(&mut r, &qa, &aa, false);
        out.push((format!("random{k} {qa:?}x{aa:?}"), g));
    }
    out
}

pub fn random_strategy(rng: &mut ChaCha8Rng, qa: &[usize], aa: &[usize]) -> Strategy {
    let na: usize = aa.iter().product();
    let nq: usize = qa.iter().product();
    let mut v = Vec::with_capacity(nq * na);
    for _ in 0..nq {
        let row: Vec<f64> = (0..na).map(|_| rng.random::<f64>().powi(3)).collect();
        let s: f64 = row.iter().sum();
        v.extend(row.iter().map(|x| x / s));
    }
    Strategy::from_fn(qa, aa, |q, a| v[index_of(qa, q) * na + index_of(aa, a)]).unwrap()
}

pub fn random_local_deterministic(rng: &mut ChaCha8Rng, qa: &[usize], aa: &[usize]) -> Strategy {
    let maps: Vec<Vec<usize>> = qa
        .iter()
        .zip(aa)
        .map(|(&nq, &na)| (0..nq).map(|_| rng.random_range(0..na)).collect())
        .collect();
    Strategy::deterministic(qa, aa, |q| q.iter().enumerate().map(|(i, &x)| maps[i][x]).collect()).unwrap()
}

/// Convex mixture of local deterministic strategies, plus a PR box on binary two-player shapes.
pub fn random_ns_strategy(rng: &mut ChaCha8Rng, qa: &[usize], aa: &[usize]) -> Strategy {
    let k = rng.random_range(1..=4);
    let mut comps: Vec<Strategy> = (0..k).map(|_| random_local_deterministic(rng, qa, aa)).collect();
    if qa == [2, 2] && aa == [2, 2] {
        comps.push(pr_box());
    }
    let w = random_dist(rng, comps.len(), false);
    Strategy::mixture(&w, &comps).unwrap()
}

/// `O(a|q)` for raw tuples.
pub fn prob(s: &Strategy, q: &[usize], a: &[usize]) -> f64 {
    let qa = s.questions().radices().to_vec();
    let aa = s.answers().radices().to_vec();
    s.prob(index_of(&qa, q), index_of(&aa, a))
}

fn with_digit(t: &[usize], i: usize, x: usize) -> Vec<usize> {
    let mut t = t.to_vec();
    t[i] = x;
    t
}

/// Marginal `O(∘, b^ī | q)` with player `i`'s answer summed out; `b` is a full answer tuple whose
/// `i`-th entry is ignored.
fn marginal(s: &Strategy, i: usize, q: &[usize], b: &[usize]) -> f64 {
    (0..s.answers().radix(i)).map(|x| prob(s, q, &with_digit(b, i, x))).sum()
}

/// Conditional-form signalling straight from the definition, over raw tuples. `s` and `b` are
/// full tuples; their `i`-th entries are the own question and an ignored answer slot.
pub fn sig_oracle(dist: &[f64], o: &Strategy, i: usize, s: &[usize], b: &[usize]) -> Option<f64> {
    let qa = o.questions().radices().to_vec();
    let p = |q: &[usize]| dist[index_of(&qa, q)];
    let block: f64 = (0..qa[i]).map(|r| p(&with_digit(s, i, r))).sum();
    if block == 0.0 {
        return None;
    }
    let avg: f64 = (0..qa[i])
        .map(|r| {
            let qr = with_digit(s, i, r);
            p(&qr) / block * marginal(o, i, &qr, b)
        })
        .sum();
    Some(p(s) * (marginal(o, i, s, b) - avg))
}

/// Best classical value by enumerating every local deterministic strategy.
pub fn classical_value(game: &Game) -> f64 {
    let qa = game.question_space().radices().to_vec();
    let aa = game.answer_space().radices().to_vec();
    // One function Q_i → A_i per player, enumerated as a mixed-radix number.
    let per: Vec<usize> = qa.iter().zip(&aa).map(|(&q, &a)| a.pow(q as u32)).collect();
    let mut best: f64 = 0.0;
    for code in tuples(&per) {
        let maps: Vec<Vec<usize>> = code
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let mut c = c;
                let mut m = vec![0; qa[i]];
                for x in m.iter_mut() {
                    *x = c % aa[i];
                    c /= aa[i];
                }
                m
            })
            .collect();
        let mut w = 0.0;
        for q in tuples(&qa) {
            let a: Vec<usize> = q.iter().enumerate().map(|(i, &x)| maps[i][x]).collect();
            let (qi, ai) = (index_of(&qa, &q), index_of(&aa, &a));
            if game.accepts(qi, ai) {
                w += game.prob(qi);
            }
        }
        best = best.max(w);
    }
    best
}

/// Wilson score interval computed from scratch, with the normal quantile from statrs.
pub fn wilson_upper(successes: u64, trials: u64) -> f64 {
    use statrs::distribution::{ContinuousCDF, Normal};
    let z = Normal::new(0.0, 1.0).unwrap().inverse_cdf(0.975);
    let n = trials as f64;
    let p = successes as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    (centre + half).min(1.0)
}

pub fn wilson_lower(successes: u64, trials: u64) -> f64 {
    1.0 - wilson_upper(trials - successes, trials)
}
