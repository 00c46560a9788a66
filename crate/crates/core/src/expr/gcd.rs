//! Multivariate polynomial GCD via subresultant pseudo-remainder sequences.
//!
//! Inputs are cleared to primitive integer-coefficient form, the gcd is
//! computed recursively (univariate in a chosen main symbol, coefficients in
//! the remaining ones), and the result is returned primitive with positive
//! leading coefficient.

use num::{BigInt, BigRational, Integer, One, Zero};

use super::poly::{Mono, Poly};

/// GCD of two polynomials over the rationals, returned as a primitive
/// integer-coefficient polynomial with positive leading coefficient.
/// `gcd(0, b) = primitive(b)` and `gcd(0, 0) = 0`.
pub fn poly_gcd(a: &Poly, b: &Poly) -> Poly {
    debug_assert_eq!(a.nsyms, b.nsyms);
    if a.is_zero() {
        return b.primitive_int().0;
    }
    if b.is_zero() {
        return a.primitive_int().0;
    }
    let (pa, ca) = a.primitive_int();
    let (pb, cb) = b.primitive_int();
    let content = rational_gcd(&ca, &cb);
    let pp = if pa == pb { pa } else { gcd_primitive(&pa, &pb) };
    pp.scale(&content)
}

/// `gcd(a/b, c/d) = gcd(a*d, c*b) / (b*d)`, always positive.
fn rational_gcd(x: &BigRational, y: &BigRational) -> BigRational {
    let n = (x.numer() * y.denom()).gcd(&(y.numer() * x.denom()));
    BigRational::new(n, x.denom() * y.denom())
}

/// Both inputs primitive with integer coefficients, nonzero.
fn gcd_primitive(a: &Poly, b: &Poly) -> Poly {
    let n = a.nsyms;
    if a.is_constant() || b.is_constant() {
        // Primitive constants are +-1 unless the polynomial is literally an
        // integer; take the integer gcd of contents to stay exact.
        let ca = int_content(a);
        let cb = int_content(b);
        return Poly::constant(n, BigRational::from(ca.gcd(&cb)));
    }
    // Monomial fast path.
    if a.num_terms() == 1 || b.num_terms() == 1 {
        return monomial_gcd(a, b);
    }
    // Certified-coprime fast path: dominates in fraction arithmetic.
    if coprime_by_probes(a, b) {
        let g = int_content(a).gcd(&int_content(b));
        return Poly::constant(n, BigRational::from(g));
    }
    // Cheap divisibility probes catch q | q^k chains from fraction arithmetic.
    if a.div_exact(b).is_some() {
        return b.primitive_int().0;
    }
    if b.div_exact(a).is_some() {
        return a.primitive_int().0;
    }
    // Heuristic gcd: evaluate at a large integer, reconstruct from base-xi
    // digits, certify by exact division. Sound whenever it returns.
    if let Some(g) = gcd_heuristic(a, b, 0) {
        return g;
    }

    // Main symbol: common to both, minimizing the larger degree.
    let main = (0..n)
        .filter(|&i| a.depends_on(i) && b.depends_on(i))
        .min_by_key(|&i| a.degree_in(i).max(b.degree_in(i)));
    let main = match main {
        Some(m) => m,
        // Disjoint symbol sets: only constants divide both.
        None => {
            let g = int_content(a).gcd(&int_content(b));
            return Poly::constant(n, BigRational::from(g));
        }
    };

    let ua = to_univariate(a, main);
    let ub = to_univariate(b, main);
    let cont_a = content(&ua);
    let cont_b = content(&ub);
    let pp_a = div_coeffs(&ua, &cont_a);
    let pp_b = div_coeffs(&ub, &cont_b);
    let cont_gcd = gcd_primitive(&cont_a, &cont_b);

    let prs = subresultant(pp_a, pp_b, main, n);
    let g = match prs {
        None => Poly::one(n), // last remainder had degree 0 in main
        Some(u) => {
            let c = content(&u);
            let pp = div_coeffs(&u, &c);
            from_univariate(&pp, main, n)
        }
    };
    g.mul(&cont_gcd).primitive_int().0
}

/// Largest coefficient magnitude of an integer polynomial.
fn max_norm(p: &Poly) -> BigInt {
    let mut m = BigInt::one();
    for c in p.terms.values() {
        let a = num::Signed::abs(c.numer());
        if a > m {
            m = a;
        }
    }
    m
}

/// Symmetric remainder in `(-xi/2, xi/2]`.
fn smod(c: &BigInt, xi: &BigInt) -> BigInt {
    let mut r = c.mod_floor(xi);
    if &r + &r > *xi {
        r -= xi;
    }
    r
}

/// Heuristic gcd on primitive integer polynomials: evaluate one variable at
/// a large integer `xi`, recurse, and lift the result back from base-`xi`
/// digits. The exact-division certificate makes a returned value correct;
/// `None` sends the caller to the subresultant fallback.
fn gcd_heuristic(a: &Poly, b: &Poly, depth: usize) -> Option<Poly> {
    let n = a.nsyms;
    if depth > 8 {
        return None;
    }
    // Recursion bottoms out when no variable is left.
    let var = (0..n)
        .filter(|&v| a.depends_on(v) || b.depends_on(v))
        .min_by_key(|&v| a.degree_in(v).max(b.degree_in(v)));
    let Some(z) = var else {
        let g = int_content(a).gcd(&int_content(b));
        return Some(Poly::constant(n, BigRational::from(g)));
    };
    let digit_bound = a.degree_in(z).min(b.degree_in(z)) as usize;

    let two = BigInt::from(2);
    let mut xi: BigInt = &two * max_norm(a).min(max_norm(b)) + &two;
    for _ in 0..6 {
        let av = BigRational::from(xi.clone());
        let ea = a.eval_symbol(z, &av);
        let eb = b.eval_symbol(z, &av);
        if !ea.is_zero() && !eb.is_zero() {
            if let Some(g) = gcd_heuristic(&ea, &eb, depth + 1) {
                if let Some(cand) = lift_digits(&g, z, &xi, digit_bound) {
                    let cand = cand.primitive_int().0;
                    if !cand.is_zero()
                        && a.div_exact(&cand).is_some()
                        && b.div_exact(&cand).is_some()
                    {
                        return Some(cand);
                    }
                }
            }
        }
        // Grow the evaluation point and retry.
        xi = &xi * BigInt::from(73794u32) / BigInt::from(27011u32) + BigInt::one();
    }
    None
}

/// Rebuilds a polynomial in `z` from the base-`xi` symmetric digits of `g`.
fn lift_digits(g: &Poly, z: usize, xi: &BigInt, digit_bound: usize) -> Option<Poly> {
    let n = g.nsyms;
    let mut rest = g.clone();
    let mut out = Poly::zero(n);
    let mut k = 0usize;
    while !rest.is_zero() {
        if k > digit_bound {
            return None;
        }
        // digit = smod(rest, xi), term by term.
        let mut digit = Poly::zero(n);
        for (m, c) in &rest.terms {
            debug_assert!(c.denom().is_one());
            let r = smod(c.numer(), xi);
            if !r.is_zero() {
                let mut mono = m.0.to_vec();
                mono[z] += k as u16;
                digit.terms.insert(Mono(mono.into_boxed_slice()), BigRational::from(r.clone()));
                // Subtract the digit from the running value in place below.
            }
        }
        // rest = (rest - digit_at_level_0) / xi
        let mut next = Poly::zero(n);
        for (m, c) in &rest.terms {
            let r = smod(c.numer(), xi);
            let q = (c.numer() - &r) / xi;
            if !q.is_zero() {
                next.terms.insert(m.clone(), BigRational::from(q));
            }
        }
        out = out.add(&digit);
        rest = next;
        k += 1;
    }
    Some(out)
}

/// Sound coprimality certificate by univariate specialization.
///
/// For each symbol both polynomials depend on, the other symbols are pinned
/// to small integers keeping both leading coefficients alive; if the
/// univariate images are coprime then the true gcd has degree zero in that
/// symbol (specialization never lowers the gcd degree under live leading
/// coefficients). All symbols cleared means the gcd is constant. Returns
/// `false` when inconclusive.
fn coprime_by_probes(a: &Poly, b: &Poly) -> bool {
    const POINTS: [i64; 12] = [2, -3, 5, -7, 11, -13, 17, -19, 23, -2, 3, -5];
    let n = a.nsyms;
    'vars: for v in 0..n {
        if !(a.depends_on(v) && b.depends_on(v)) {
            continue;
        }
        'attempts: for attempt in 0..5usize {
            let assign: Vec<BigRational> = (0..n)
                .map(|j| BigRational::from(num::BigInt::from(POINTS[(j + 3 * attempt) % POINTS.len()])))
                .collect();
            let ua = specialize(a, v, &assign);
            let ub = specialize(b, v, &assign);
            // Leading coefficients must survive the specialization.
            if ua.len() != a.degree_in(v) as usize + 1 || ub.len() != b.degree_in(v) as usize + 1 {
                continue 'attempts;
            }
            if univariate_coprime(&ua, &ub) {
                continue 'vars;
            }
            // A genuine common factor in this symbol: inconclusive.
            return false;
        }
        return false;
    }
    true
}

/// Dense coefficient vector in symbol `v` after pinning all other symbols.
/// Trailing zero coefficients are trimmed.
fn specialize(p: &Poly, v: usize, assign: &[BigRational]) -> Vec<BigRational> {
    let d = p.degree_in(v) as usize;
    let mut out = vec![BigRational::zero(); d + 1];
    for (m, c) in &p.terms {
        let mut t = c.clone();
        for (j, &e) in m.0.iter().enumerate() {
            if j == v || e == 0 {
                continue;
            }
            for _ in 0..e {
                t *= &assign[j];
            }
        }
        out[m.0[v] as usize] += t;
    }
    while out.len() > 1 && out.last().map(|c| c.is_zero()).unwrap_or(false) {
        out.pop();
    }
    out
}

/// Euclidean coprimality test for dense univariate rational polynomials.
fn univariate_coprime(a: &[BigRational], b: &[BigRational]) -> bool {
    let mut f: Vec<BigRational> = a.to_vec();
    let mut g: Vec<BigRational> = b.to_vec();
    let deg = |p: &[BigRational]| p.iter().rposition(|c| !c.is_zero());
    loop {
        let (df, dg) = match (deg(&f), deg(&g)) {
            (None, _) | (_, None) => return false, // zero polynomial: not coprime here
            (Some(df), Some(dg)) => (df, dg),
        };
        if df == 0 || dg == 0 {
            return true;
        }
        if df < dg {
            std::mem::swap(&mut f, &mut g);
            continue;
        }
        // f <- f mod g.
        let lg = g[dg].clone();
        for k in (dg..=df).rev() {
            let c = &f[k] / &lg;
            if c.is_zero() {
                continue;
            }
            for i in 0..=dg {
                let sub = &c * &g[i];
                f[k - dg + i] = &f[k - dg + i] - sub;
            }
        }
        f.truncate(dg);
        if deg(&f).is_none() {
            return false; // g divides f: common factor of positive degree
        }
    }
}

fn monomial_gcd(a: &Poly, b: &Poly) -> Poly {
    let n = a.nsyms;
    let mono_of = |p: &Poly| -> Mono {
        let mut it = p.terms.keys();
        let mut acc = it.next().unwrap().clone();
        for m in it {
            acc = acc.gcd(m);
        }
        acc
    };
    let m = mono_of(a).gcd(&mono_of(b));
    let c = int_content(a).gcd(&int_content(b));
    let mut out = Poly::zero(n);
    out.terms.insert(m, BigRational::from(c));
    out
}

fn int_content(p: &Poly) -> BigInt {
    let mut g = BigInt::zero();
    for c in p.terms.values() {
        debug_assert!(c.denom().is_one());
        g = g.gcd(c.numer());
    }
    if g.is_zero() {
        BigInt::one()
    } else {
        g
    }
}

/// Coefficient vector in the main symbol; index = exponent, coefficients have
/// that symbol's exponent zeroed.
fn to_univariate(p: &Poly, main: usize) -> Vec<Poly> {
    let d = p.degree_in(main) as usize;
    let mut coeffs = vec![Poly::zero(p.nsyms); d + 1];
    for (m, c) in &p.terms {
        let e = m.0[main] as usize;
        let mut v = m.0.to_vec();
        v[main] = 0;
        coeffs[e].terms.insert(Mono(v.into_boxed_slice()), c.clone());
    }
    coeffs
}

fn from_univariate(coeffs: &[Poly], main: usize, n: usize) -> Poly {
    let mut out = Poly::zero(n);
    for (e, c) in coeffs.iter().enumerate() {
        for (m, k) in &c.terms {
            let mut v = m.0.to_vec();
            v[main] = e as u16;
            out.terms.insert(Mono(v.into_boxed_slice()), k.clone());
        }
    }
    out
}

fn deg(u: &[Poly]) -> Option<usize> {
    u.iter().rposition(|c| !c.is_zero())
}

/// GCD of the coefficient list (the content w.r.t. the main symbol).
fn content(u: &[Poly]) -> Poly {
    let n = u.iter().find(|c| !c.is_zero()).map(|c| c.nsyms).unwrap_or(0);
    let mut g = Poly::zero(n);
    for c in u {
        if c.is_zero() {
            continue;
        }
        g = if g.is_zero() { c.primitive_int().0 } else { gcd_primitive(&g, &c.primitive_int().0) };
        if g.is_constant() {
            break;
        }
    }
    if g.is_zero() {
        Poly::one(n)
    } else if g.is_constant() {
        // Keep the integer content exact across the coefficient list.
        let mut ic = BigInt::zero();
        for c in u {
            if !c.is_zero() {
                ic = ic.gcd(&int_content(c));
            }
        }
        Poly::constant(n, BigRational::from(ic))
    } else {
        // Non-constant primitive part times the shared integer content.
        let mut ic = BigInt::zero();
        for c in u {
            if !c.is_zero() {
                ic = ic.gcd(&int_content(c));
            }
        }
        g.scale(&BigRational::from(ic))
    }
}

fn div_coeffs(u: &[Poly], d: &Poly) -> Vec<Poly> {
    u.iter()
        .map(|c| {
            if c.is_zero() {
                c.clone()
            } else {
                c.div_exact(d).expect("content must divide its polynomial")
            }
        })
        .collect()
}

fn mul_coeffs(u: &[Poly], f: &Poly) -> Vec<Poly> {
    u.iter().map(|c| c.mul(f)).collect()
}

/// Pseudo-remainder `lc(b)^(da-db+1) * a mod b` in the main symbol.
fn pseudo_rem(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    let da = deg(a).unwrap();
    let db = deg(b).unwrap();
    debug_assert!(da >= db);
    let lb = &b[db];
    let mut r: Vec<Poly> = a.to_vec();
    let mut steps = (da - db + 1) as i64;
    while let Some(dr) = deg(&r) {
        if dr < db {
            break;
        }
        let lr = r[dr].clone();
        // r = lb*r - lr * x^(dr-db) * b
        let mut next = mul_coeffs(&r, lb);
        let shift = dr - db;
        for (i, bc) in b.iter().enumerate() {
            if bc.is_zero() {
                continue;
            }
            next[i + shift] = next[i + shift].sub(&bc.mul(&lr));
        }
        r = next;
        steps -= 1;
    }
    // Scale by the unused lb powers so the subresultant divisions stay exact.
    for _ in 0..steps {
        r = mul_coeffs(&r, lb);
    }
    r
}

/// Subresultant PRS; returns the last nonzero remainder if it has positive
/// degree in the main symbol, `None` when the gcd is trivial in that symbol.
fn subresultant(a: Vec<Poly>, b: Vec<Poly>, _main: usize, n: usize) -> Option<Vec<Poly>> {
    let (mut a, mut b) = if deg(&a).unwrap() >= deg(&b).unwrap() { (a, b) } else { (b, a) };
    let mut g = Poly::one(n);
    let mut h = Poly::one(n);
    loop {
        let da = deg(&a).unwrap();
        let db = deg(&b).unwrap();
        let delta = (da - db) as u32;
        let r = pseudo_rem(&a, &b);
        match deg(&r) {
            None => return if db == 0 { None } else { Some(b) },
            Some(0) => return None,
            Some(_) => {
                let divisor = g.mul(&h.pow(delta));
                let r: Vec<Poly> = r
                    .iter()
                    .map(|c| {
                        if c.is_zero() {
                            c.clone()
                        } else {
                            c.div_exact(&divisor).expect("subresultant division is exact")
                        }
                    })
                    .collect();
                a = b;
                b = r;
                g = a[deg(&a).unwrap()].clone();
                h = match delta {
                    0 => h,
                    1 => g.clone(),
                    _ => g.pow(delta).div_exact(&h.pow(delta - 1)).expect("subresultant h update is exact"),
                };
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::FromPrimitive;

    fn q(n: i64) -> BigRational {
        BigRational::from_i64(n).unwrap()
    }

    #[test]
    fn univariate_gcd() {
        let x = Poly::var(1, 0);
        // (x^2 - 1) and (x^2 + 2x + 1) share x + 1.
        let a = x.pow(2).sub(&Poly::one(1));
        let b = x.pow(2).add(&x.scale(&q(2))).add(&Poly::one(1));
        assert_eq!(poly_gcd(&a, &b), x.add(&Poly::one(1)));
    }

    #[test]
    fn multivariate_gcd() {
        let x = Poly::var(3, 0);
        let y = Poly::var(3, 1);
        let z = Poly::var(3, 2);
        let common = x.mul(&y).add(&z.pow(2)).add(&Poly::one(3));
        let a = common.mul(&x.add(&y));
        let b = common.mul(&y.sub(&z)).mul(&common);
        let g = poly_gcd(&a, &b);
        assert_eq!(g, common);
    }

    #[test]
    fn coprime_and_constants() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let g = poly_gcd(&x.add(&Poly::one(2)), &y.add(&Poly::one(2)));
        assert_eq!(g, Poly::one(2));
        let g2 = poly_gcd(&Poly::constant(2, q(4)), &Poly::constant(2, q(6)));
        assert_eq!(g2, Poly::constant(2, q(2)));
    }

    #[test]
    fn power_denominators() {
        // gcd(d^2, d^3) = d^2 for d = v3^2 + v4^2.
        let v3 = Poly::var(2, 0);
        let v4 = Poly::var(2, 1);
        let d = v3.pow(2).add(&v4.pow(2));
        assert_eq!(poly_gcd(&d.pow(2), &d.pow(3)), d.pow(2));
    }
}
