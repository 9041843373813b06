//! Independent reference implementations shared by the integration tests.
//! These read tables only through `shapes()` and `row()`, with their own
//! indexing, so they do not reuse the library's scans or recursions.
#![allow(dead_code)]

use num_rational::Ratio;
use pfqn::{PartyShape, ProcessTable};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Mixed-radix digits, last position fastest.
pub fn digits(mut index: usize, radices: &[usize]) -> Vec<usize> {
    let mut out = vec![0; radices.len()];
    for k in (0..radices.len()).rev() {
        out[k] = index % radices[k];
        index /= radices[k];
    }
    out
}

pub fn number(ds: &[usize], radices: &[usize]) -> usize {
    ds.iter().zip(radices).fold(0, |acc, (&d, &r)| acc * r + d)
}

fn a_radices(w: &ProcessTable) -> Vec<usize> {
    w.shapes().iter().map(|s| s.a_size).collect()
}

fn x_radices(w: &ProcessTable) -> Vec<usize> {
    w.shapes().iter().map(|s| s.x_size).collect()
}

pub fn eval(w: &ProcessTable, a: &[usize]) -> Vec<usize> {
    w.row(number(a, &a_radices(w))).to_vec()
}

/// Unique-fixed-point test over every deterministic intervention.
pub fn oracle_valid(w: &ProcessTable) -> bool {
    let ar = a_radices(w);
    let xr = x_radices(w);
    let nx: usize = xr.iter().product();
    // one radix-|A_k| digit per (k, x_k)
    let graph_radices: Vec<usize> = w
        .shapes()
        .iter()
        .flat_map(|s| std::iter::repeat_n(s.a_size, s.x_size))
        .collect();
    let total: usize = graph_radices.iter().product();
    let offsets: Vec<usize> = xr
        .iter()
        .scan(0, |acc, &x| {
            let o = *acc;
            *acc += x;
            Some(o)
        })
        .collect();
    for fi in 0..total {
        let g = digits(fi, &graph_radices);
        let mut count = 0;
        for xi in 0..nx {
            let x = digits(xi, &xr);
            let a: Vec<usize> = (0..x.len()).map(|k| g[offsets[k] + x[k]]).collect();
            if w.row(number(&a, &ar)) == x.as_slice() {
                count += 1;
                if count > 1 {
                    break;
                }
            }
        }
        if count != 1 {
            return false;
        }
    }
    true
}

pub fn oracle_nss(w: &ProcessTable) -> bool {
    let ar = a_radices(w);
    let na: usize = ar.iter().product();
    (0..na).all(|i| {
        let a = digits(i, &ar);
        (0..a.len()).all(|k| {
            (0..ar[k]).all(|v| {
                let mut b = a.clone();
                b[k] = v;
                eval(w, &b)[k] == eval(w, &a)[k]
            })
        })
    })
}

/// Deterministic causal correlations, by the recursive definition applied
/// to the raw map `a ↦ w(a)` restricted to the `live` parties with the
/// others' outputs pinned in `pinned`.
pub fn oracle_causal(w: &ProcessTable) -> bool {
    let n = w.parties();
    causal_on(w, &(0..n).collect::<Vec<_>>(), &mut vec![None; n])
}

fn causal_on(w: &ProcessTable, live: &[usize], pinned: &mut Vec<Option<usize>>) -> bool {
    if live.len() <= 1 {
        return true;
    }
    let ar = a_radices(w);
    let live_radices: Vec<usize> = live.iter().map(|&k| ar[k]).collect();
    let total: usize = live_radices.iter().product();
    let full = |pinned: &Vec<Option<usize>>, i: usize| {
        let d = digits(i, &live_radices);
        let mut a: Vec<usize> = pinned.iter().map(|p| p.unwrap_or(0)).collect();
        for (j, &k) in live.iter().enumerate() {
            a[k] = d[j];
        }
        a
    };
    for (j, &k) in live.iter().enumerate() {
        let first = eval(w, &full(pinned, 0))[k];
        if !(0..total).all(|i| eval(w, &full(pinned, i))[k] == first) {
            continue;
        }
        let rest: Vec<usize> = live.iter().copied().filter(|&m| m != k).collect();
        let ok = (0..live_radices[j]).all(|v| {
            pinned[k] = Some(v);
            let r = causal_on(w, &rest, pinned);
            pinned[k] = None;
            r
        });
        if ok {
            return true;
        }
    }
    false
}

/// Optimal deterministic causal success probability, by explicit
/// enumeration: at each node every remaining party and every full response
/// table of that party is tried.
pub fn oracle_game(w: &ProcessTable) -> Ratio<u64> {
    let n = w.parties();
    let sizes: Vec<(usize, usize)> = w.shapes().iter().map(|s| (s.a_size, s.x_size)).collect();
    let inputs: u64 = sizes.iter().map(|&(i, _)| i as u64).product();
    let mut i = vec![None; n];
    let mut o = vec![None; n];
    let wins = game_node(w, &sizes, &mut i, &mut o);
    Ratio::new(wins, inputs)
}

fn game_node(
    w: &ProcessTable,
    sizes: &[(usize, usize)],
    i: &mut Vec<Option<usize>>,
    o: &mut Vec<Option<usize>>,
) -> u64 {
    let n = sizes.len();
    if i.iter().all(Option::is_some) {
        let a: Vec<usize> = i.iter().map(|v| v.unwrap()).collect();
        let target = eval(w, &a);
        let got: Vec<usize> = o.iter().map(|v| v.unwrap()).collect();
        return u64::from(target == got);
    }
    let mut best = 0;
    let open: Vec<usize> = (0..n).filter(|&k| i[k].is_none()).collect();
    for k in open {
        let (ni, no) = sizes[k];
        let tables = no.pow(ni as u32);
        for t in 0..tables {
            let resp = digits(t, &vec![no; ni]);
            let mut wins = 0;
            for v in 0..ni {
                i[k] = Some(v);
                o[k] = Some(resp[v]);
                wins += game_node(w, sizes, i, o);
            }
            i[k] = None;
            o[k] = None;
            best = best.max(wins);
        }
    }
    best
}

/// The 4096 tripartite binary tables with every `w_k` blind to `a_k`.
pub fn tripartite_nss() -> impl Iterator<Item = ProcessTable> {
    (0..4096usize).map(|code| {
        let f = digits(code, &[16, 16, 16]);
        ProcessTable::from_fn(vec![PartyShape::sq(2); 3], move |a| {
            let others = |k: usize| {
                let o: Vec<usize> = (0..3).filter(|&j| j != k).map(|j| a[j]).collect();
                o[0] * 2 + o[1]
            };
            (0..3).map(|k| (f[k] >> others(k)) & 1).collect()
        })
        .unwrap()
    })
}

/// Every table of the given shapes.
pub fn all_tables(shapes: Vec<PartyShape>) -> impl Iterator<Item = ProcessTable> {
    let na: usize = shapes.iter().map(|s| s.a_size).product();
    let xr: Vec<usize> = shapes.iter().map(|s| s.x_size).collect();
    let row_count: usize = xr.iter().product();
    let radices = vec![row_count; na];
    let total = (row_count as u128).pow(na as u32) as usize;
    (0..total).map(move |code| {
        let rows = digits(code, &radices)
            .into_iter()
            .map(|r| digits(r, &xr))
            .collect();
        ProcessTable::new(shapes.clone(), rows).unwrap()
    })
}

/// Every non-self-signaling table of the given shapes.
pub fn all_nss_tables(shapes: Vec<PartyShape>) -> Vec<ProcessTable> {
    let n = shapes.len();
    let ar: Vec<usize> = shapes.iter().map(|s| s.a_size).collect();
    let others: Vec<Vec<usize>> = (0..n)
        .map(|k| (0..n).filter(|&j| j != k).map(|j| ar[j]).collect())
        .collect();
    let dom: Vec<usize> = others.iter().map(|o| o.iter().product()).collect();
    let counts: Vec<usize> = (0..n).map(|k| shapes[k].x_size.pow(dom[k] as u32)).collect();
    let total: usize = counts.iter().product();
    (0..total)
        .map(|code| {
            let f = digits(code, &counts);
            let comps: Vec<Vec<usize>> = (0..n)
                .map(|k| digits(f[k], &vec![shapes[k].x_size; dom[k]]))
                .collect();
            ProcessTable::from_fn(shapes.clone(), |a| {
                (0..n)
                    .map(|k| {
                        let rest: Vec<usize> =
                            (0..n).filter(|&j| j != k).map(|j| a[j]).collect();
                        comps[k][number(&rest, &others[k])]
                    })
                    .collect()
            })
            .unwrap()
        })
        .collect()
}

/// Random table with mixed alphabets. Components are non-self-signaling
/// except with probability `1/8`, and often depend on few parties.
pub fn random_table(rng: &mut ChaCha8Rng, max_parties: usize) -> ProcessTable {
    loop {
        let n = rng.random_range(1..=max_parties);
        let shapes: Vec<PartyShape> = (0..n)
            .map(|_| PartyShape::new(rng.random_range(1..=3), rng.random_range(1..=3)).unwrap())
            .collect();
        let count: u128 = shapes
            .iter()
            .map(|s| (s.a_size as u128).pow(s.x_size as u32))
            .product();
        if count > 20_000 {
            continue;
        }
        let ar: Vec<usize> = shapes.iter().map(|s| s.a_size).collect();
        let na: usize = ar.iter().product();
        // each component reads a random subset of the other parties
        let reads: Vec<Vec<bool>> = (0..n)
            .map(|k| {
                let blind_self = rng.random_range(0..8) != 0;
                (0..n)
                    .map(|j| !(j == k && blind_self) && rng.random_bool(0.6))
                    .collect()
            })
            .collect();
        let lookup: Vec<Vec<usize>> = (0..n)
            .map(|k| (0..na).map(|_| rng.random_range(0..shapes[k].x_size)).collect())
            .collect();
        let w = ProcessTable::from_fn(shapes.clone(), |a| {
            (0..n)
                .map(|k| {
                    let masked: Vec<usize> =
                        (0..n).map(|j| if reads[k][j] { a[j] } else { 0 }).collect();
                    lookup[k][number(&masked, &ar)]
                })
                .collect()
        })
        .unwrap();
        return w;
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
