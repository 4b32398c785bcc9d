use super::{CyclicWord, Letter};
fn at(v: &[Letter], i: usize) -> Letter {
    v[i % v.len()]
}

/// Start positions of cyclic `E𝓔H` and `H𝓔E` factors.
pub fn redexes(w: &CyclicWord) -> Vec<usize> {
    let v = &w.letters;
    if v.len() < 3 {
        return Vec::new();
    }
    (0..v.len())
        .filter(|&i| {
            at(v, i + 1) == Letter::Ent
                && matches!((at(v, i), at(v, i + 2)), (Letter::E, Letter::H) | (Letter::H, Letter::E))
        })
        .collect()
}

/// Replaces the factor starting at `i` by a single `𝓔`.
pub fn apply_redex(w: &CyclicWord, i: usize) -> CyclicWord {
    let n = w.letters.len();
    let mut letters: Vec<Letter> = (0..n - 3).map(|k| at(&w.letters, i + 3 + k)).collect();
    letters.push(Letter::Ent);
    CyclicWord { letters, residue: w.residue }
}

fn rotate_min(v: &[Letter]) -> Vec<Letter> {
    CyclicWord::new(v.to_vec()).min_rotation()
}

fn movable(l: Letter) -> bool {
    matches!(l, Letter::E | Letter::H)
}

fn cancels(a: Letter, b: Letter) -> bool {
    matches!((a, b), (Letter::E, Letter::H) | (Letter::H, Letter::E))
}

/// Non-`𝓔` letters in cyclic order, each with the number of `𝓔` that follow it.
fn gaps(v: &[Letter]) -> (Vec<Letter>, Vec<usize>) {
    let n = v.len();
    let Some(first) = v.iter().position(|&l| l != Letter::Ent) else { return (Vec::new(), Vec::new()) };
    let (mut xs, mut d) = (Vec::new(), Vec::new());
    for i in 0..n {
        let l = v[(first + i) % n];
        if l == Letter::Ent {
            *d.last_mut().unwrap() += 1;
        } else {
            xs.push(l);
            d.push(0);
        }
    }
    (xs, d)
}

fn spell(xs: &[Letter], d: &[usize]) -> Vec<Letter> {
    let mut out = Vec::new();
    for (&x, &g) in xs.iter().zip(d) {
        out.push(x);
        out.extend(std::iter::repeat_n(Letter::Ent, g));
    }
    out
}

/// Normal form under `E𝓔H ∼ 𝓔 ∼ H𝓔E`.
///
/// The moves `X𝓔𝓔 ↔ 𝓔𝓔X` (`X ∈ {E, H}`) keep the cyclic order of the non-`𝓔` letters and
/// the parity of each gap, and `P` letters never move. Two neighbours `E`, `H` can therefore be
/// brought together exactly when the gap between them is odd. After all such cancellations the
/// gaps are packed to their parity, with the spare `𝓔𝓔` pairs of each stretch between parabolic
/// letters placed before the closing `P`. Without parabolic letters the spare pairs go into the
/// gap giving the least rotation.
pub fn reduce(w: &CyclicWord) -> CyclicWord {
    let k = w.letters.iter().filter(|&&l| l == Letter::Ent).count();
    let (mut xs, mut d) = gaps(&w.letters);
    if k == 0 || xs.is_empty() {
        return CyclicWord { letters: rotate_min(&w.letters), residue: w.residue };
    }
    loop {
        let m = xs.len();
        if m < 2 {
            break;
        }
        let Some(j) = (0..m).find(|&j| cancels(xs[j], xs[(j + 1) % m]) && d[j] % 2 == 1) else { break };
        if m == 2 {
            xs.clear();
            d.clear();
            break;
        }
        let shift = (j + m - 1) % m;
        xs.rotate_left(shift);
        d.rotate_left(shift);
        d[0] += d[1] + d[2];
        xs.drain(1..3);
        d.drain(1..3);
    }
    if xs.is_empty() {
        return CyclicWord { letters: vec![Letter::Ent; k], residue: w.residue };
    }
    let m = xs.len();
    let parity: Vec<usize> = d.iter().map(|g| g % 2).collect();
    let letters = if let Some(p0) = xs.iter().position(|&l| !movable(l) && l != Letter::Ent) {
        let mut packed = parity.clone();
        let mut spare = 0;
        for step in 1..=m {
            let j = (p0 + step) % m;
            let prev = (j + m - 1) % m;
            spare += d[prev] - parity[prev];
            if !movable(xs[j]) {
                packed[prev] += spare;
                spare = 0;
            }
        }
        rotate_min(&spell(&xs, &packed))
    } else {
        let spare: usize = d.iter().zip(&parity).map(|(g, p)| g - p).sum();
        (0..m)
            .map(|i| {
                let mut packed = parity.clone();
                packed[i] += spare;
                rotate_min(&spell(&xs, &packed))
            })
            .min()
            .unwrap_or_default()
    };
    CyclicWord { letters, residue: w.residue }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::parse_word;
    use std::collections::{BTreeMap, BTreeSet, VecDeque};

    fn moves(v: &[Letter]) -> Vec<Vec<Letter>> {
        let n = v.len();
        let mut out = Vec::new();
        if n < 3 {
            return out;
        }
        for i in 0..n {
            let (a, b, c) = (at(v, i), at(v, i + 1), at(v, i + 2));
            let replacement = if movable(a) && b == Letter::Ent && c == Letter::Ent {
                Some([b, c, a])
            } else if a == Letter::Ent && b == Letter::Ent && movable(c) {
                Some([c, a, b])
            } else {
                None
            };
            if let Some(r) = replacement {
                let mut u = v.to_vec();
                for (k, l) in r.into_iter().enumerate() {
                    u[(i + k) % n] = l;
                }
                out.push(rotate_min(&u));
            }
        }
        out
    }

    /// Class of `w` under the moves, after exhausting every reachable cancellation.
    fn class_by_search(w: &CyclicWord) -> BTreeSet<Vec<Letter>> {
        let mut cur = w.clone();
        loop {
            let start = rotate_min(&cur.letters);
            let mut seen = BTreeSet::from([start.clone()]);
            let mut queue = VecDeque::from([start]);
            let mut shorter = None;
            while let Some(v) = queue.pop_front() {
                let cw = CyclicWord::new(v.clone());
                if let Some(&i) = redexes(&cw).first() {
                    shorter = Some(apply_redex(&cw, i));
                    break;
                }
                for u in moves(&v) {
                    if seen.insert(u.clone()) {
                        queue.push_back(u);
                    }
                }
            }
            match shorter {
                Some(s) => cur = s,
                None => return seen,
            }
        }
    }

    fn words(alphabet: &[Letter], max_len: usize) -> Vec<CyclicWord> {
        let mut out = vec![Vec::new()];
        let mut frontier = vec![Vec::new()];
        for _ in 0..max_len {
            frontier = frontier
                .iter()
                .flat_map(|w: &Vec<Letter>| alphabet.iter().map(move |&l| [w.clone(), vec![l]].concat()))
                .collect();
            out.extend(frontier.iter().cloned());
        }
        out.into_iter().map(CyclicWord::new).collect()
    }

    #[test]
    fn normal_form_matches_exhaustive_search() {
        let nu = Letter::Par(num_complex::Complex64::new(0.0, 1.0));
        for (alphabet, len) in [(vec![Letter::E, Letter::H, Letter::Ent], 8), (vec![Letter::E, Letter::H, Letter::Ent, nu], 6)] {
            let mut by_class: BTreeMap<Vec<Letter>, BTreeSet<Vec<Letter>>> = BTreeMap::new();
            for w in words(&alphabet, len) {
                let class = class_by_search(&w);
                let nf = reduce(&w).letters;
                assert!(class.contains(&nf), "{w} -> {}", CyclicWord::new(nf.clone()));
                by_class.entry(class.iter().next().cloned().unwrap_or_default()).or_default().insert(nf);
            }
            for (rep, nfs) in by_class {
                assert_eq!(nfs.len(), 1, "class of {} has {} normal forms", CyclicWord::new(rep), nfs.len());
            }
        }
    }

    #[test]
    fn long_words_reduce_quickly() {
        let w = parse_word(&"E**H*E***H**P(0+1i)".repeat(20)).unwrap();
        let r = reduce(&w);
        assert_eq!(reduce(&r), r);
        let w = parse_word("E**E****EE*E**E***E**H**E*E****E*H").unwrap();
        assert_eq!(reduce(&reduce(&w)), reduce(&w));
    }

    fn red(s: &str) -> String {
        reduce(&parse_word(s).unwrap()).to_string()
    }

    #[test]
    fn basic_relations() {
        assert_eq!(red("E*H"), "*");
        assert_eq!(red("H*E"), "*");
        assert_eq!(red("H*E*"), "**");
        assert_eq!(red("**"), "**");
        assert_eq!(red("E*H*"), "**");
    }

    #[test]
    fn both_redex_orders_agree() {
        let w = parse_word("E*H*EH").unwrap();
        let outs: BTreeSet<String> = redexes(&w).into_iter().map(|i| reduce(&apply_redex(&w, i)).to_string()).collect();
        assert_eq!(outs.len(), 1);
        assert_eq!(outs.into_iter().next().unwrap(), reduce(&w).to_string());
    }

    #[test]
    fn parabolic_letters_block_moves() {
        assert_eq!(red("EP(0+1i)*H"), "EP(0+1i)*H");
        let r = reduce(&parse_word("E*HP(0+2i)E*HP(0-2i)").unwrap());
        assert_eq!(r.counts(), (0, 0, 2));
    }
}
