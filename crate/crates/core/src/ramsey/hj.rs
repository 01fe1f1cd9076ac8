//! Combinatorial lines in `{0..t}^n` and exhaustive Hales-Jewett numbers.

/// Every combinatorial line of `{0..t}^n` as the list of its `t` points,
/// each point encoded in base `t` with coordinate 0 most significant.
pub fn combinatorial_lines(t: usize, n: usize) -> Vec<Vec<usize>> {
    // A line is a word over {0..t} ∪ {*} with at least one *.
    let star = t;
    let mut out = Vec::new();
    let mut word = vec![0usize; n];
    loop {
        if word.contains(&star) {
            let line = (0..t)
                .map(|a| word.iter().fold(0, |acc, &c| acc * t + if c == star { a } else { c }))
                .collect();
            out.push(line);
        }
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if word[i] < star {
                word[i] += 1;
                break;
            }
            word[i] = 0;
        }
    }
}

/// An `r`-colouring of `{0..t}^n` with no monochromatic combinatorial line.
///
/// A seeded local search runs first; if it fails, backtracking with colour
/// symmetry broken decides the question exactly.
pub fn line_free_colouring(t: usize, r: usize, n: usize) -> Option<Vec<u8>> {
    assert!(t >= 1 && r >= 1 && r <= u8::MAX as usize);
    let points = t.pow(n as u32);
    let lines = combinatorial_lines(t, n);
    if let Some(c) = local_search(points, r, &lines) {
        return Some(c);
    }
    // Each line is checked when its last point is coloured.
    let mut ending: Vec<Vec<usize>> = vec![Vec::new(); points];
    for (i, l) in lines.iter().enumerate() {
        ending[*l.iter().max().unwrap()].push(i);
    }
    let mut colour = vec![0u8; points];
    fn rec(p: usize, used: u8, r: u8, colour: &mut [u8], lines: &[Vec<usize>], ending: &[Vec<usize>]) -> bool {
        if p == colour.len() {
            return true;
        }
        for c in 0..(used + 1).min(r) {
            colour[p] = c;
            let mono = ending[p].iter().any(|&l| lines[l].iter().all(|&q| colour[q] == c));
            if !mono && rec(p + 1, used.max(c + 1), r, colour, lines, ending) {
                return true;
            }
        }
        false
    }
    rec(0, 0, r as u8, &mut colour, &lines, &ending).then_some(colour)
}

/// Min-conflicts walk: recolour a point of a random monochromatic line.
fn local_search(points: usize, r: usize, lines: &[Vec<usize>]) -> Option<Vec<u8>> {
    use rand::{Rng, SeedableRng};
    if r == 1 {
        return lines.is_empty().then(|| vec![0; points]);
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
    let mut through: Vec<Vec<usize>> = vec![Vec::new(); points];
    for (i, l) in lines.iter().enumerate() {
        for &p in l {
            through[p].push(i);
        }
    }
    let mut colour: Vec<u8> = (0..points).map(|_| rng.gen_range(0..r) as u8).collect();
    // count[l * r + c]: points of line l with colour c.
    let mut count = vec![0usize; lines.len() * r];
    for (i, l) in lines.iter().enumerate() {
        for &p in l {
            count[i * r + colour[p] as usize] += 1;
        }
    }
    let mono = |count: &[usize], i: usize| (0..r).any(|c| count[i * r + c] == lines[i].len());
    let mut bad: Vec<usize> = (0..lines.len()).filter(|&i| mono(&count, i)).collect();
    let flips = 50 * points + 10_000;
    for _ in 0..flips {
        bad.retain(|&i| mono(&count, i));
        let Some(&line) = bad.get(rng.gen_range(0..bad.len().max(1))) else {
            return Some(colour);
        };
        // Candidate moves: any point of the line to any other colour.
        let cost = |p: usize, c: u8, count: &[usize]| -> usize {
            through[p]
                .iter()
                .filter(|&&i| count[i * r + c as usize] + 1 == lines[i].len())
                .count()
        };
        let (p, c) = if rng.gen_bool(0.2) {
            let p = lines[line][rng.gen_range(0..lines[line].len())];
            let c = (colour[p] as usize + rng.gen_range(1..r)) % r;
            (p, c as u8)
        } else {
            let mut best = (usize::MAX, 0, 0u8);
            for &p in &lines[line] {
                for c in (0..r as u8).filter(|&c| c != colour[p]) {
                    let k = cost(p, c, &count);
                    if k < best.0 {
                        best = (k, p, c);
                    }
                }
            }
            (best.1, best.2)
        };
        for &i in &through[p] {
            count[i * r + colour[p] as usize] -= 1;
            count[i * r + c as usize] += 1;
            if count[i * r + c as usize] == lines[i].len() {
                bad.push(i);
            }
        }
        colour[p] = c;
    }
    bad.retain(|&i| mono(&count, i));
    bad.is_empty().then_some(colour)
}

/// Least `n` in `1..=cap` such that every `r`-colouring of `{0..t}^n` has a
/// monochromatic combinatorial line.
pub fn hales_jewett_number(t: usize, r: usize, cap: usize) -> Option<usize> {
    (1..=cap).find(|&n| line_free_colouring(t, r, n).is_none())
}
