use std::collections::HashSet;

use super::lattice::LatticePoint;

/// Cookie configuration: the finite set of sites whose cookie has been eaten.
///
/// Every site not in the set still holds its cookie, so `CookieField::default()` is
/// the fresh environment in which all cookies are present.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CookieField {
    eaten: HashSet<LatticePoint>,
}

impl CookieField {
    pub fn new() -> Self {
        Self::default()
    }

    /// Field in which exactly the sites of `eaten` have lost their cookie.
    pub fn with_eaten<I: IntoIterator<Item = LatticePoint>>(eaten: I) -> Self {
        CookieField { eaten: eaten.into_iter().collect() }
    }

    /// `I_x`: whether the cookie at `x` is still present.
    pub fn has_cookie(&self, x: &LatticePoint) -> bool {
        !self.eaten.contains(x)
    }

    /// Removes the cookie at `x`; returns whether one was there.
    pub fn eat(&mut self, x: &LatticePoint) -> bool {
        self.eaten.insert(x.clone())
    }

    /// Sets `I_x` explicitly.
    pub fn set_cookie(&mut self, x: &LatticePoint, present: bool) {
        if present {
            self.eaten.remove(x);
        } else {
            self.eaten.insert(x.clone());
        }
    }

    pub fn eaten_count(&self) -> usize {
        self.eaten.len()
    }

    pub fn eaten(&self) -> impl Iterator<Item = &LatticePoint> {
        self.eaten.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eat_and_restore() {
        let mut f = CookieField::new();
        let x = LatticePoint::unit(2, 0, 1);
        assert!(f.has_cookie(&x));
        assert!(f.eat(&x));
        assert!(!f.eat(&x));
        assert!(!f.has_cookie(&x));
        f.set_cookie(&x, true);
        assert!(f.has_cookie(&x));
        assert_eq!(f.eaten_count(), 0);
    }
}
