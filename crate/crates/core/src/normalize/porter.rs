//! Porter stemmer.
//!
//! Strips the commoner morphological and inflectional endings from English
//! words via the classic five-step suffix rewrite sequence. The rules match
//! the widely distributed reference implementation of the algorithm, which
//! is what the standard test vocabulary pair was produced with; it keeps
//! words of one or two letters unchanged and carries the `bli -> ble` and
//! `logi -> log` rule variants.

/// Stem a lowercase alphabetic token.
///
/// Tokens shorter than three letters, or containing anything outside
/// `a-z`, are returned unchanged.
pub fn stem(word: &str) -> String {
    if word.len() <= 2 || !word.bytes().all(|c| c.is_ascii_lowercase()) {
        return word.to_string();
    }
    let mut s = Stemmer {
        b: word.as_bytes().to_vec(),
        k: (word.len() - 1) as isize,
        j: 0,
    };
    s.step1ab();
    s.step1c();
    s.step2();
    s.step3();
    s.step4();
    s.step5();
    String::from_utf8(s.b[..=(s.k as usize)].to_vec()).expect("ascii buffer")
}

/// Working buffer plus two cursors: `k` is the index of the last live
/// letter, `j` marks the end of the stem once a suffix has matched.
/// Bytes past `k` are stale but deliberately kept, mirroring the original
/// buffer semantics (`m()` may look one past `k` in step 5).
struct Stemmer {
    b: Vec<u8>,
    k: isize,
    j: isize,
}

impl Stemmer {
    /// Is b[i] a consonant? `y` counts as a consonant at the word start or
    /// after a vowel.
    fn cons(&self, i: isize) -> bool {
        match self.b[i as usize] {
            b'a' | b'e' | b'i' | b'o' | b'u' => false,
            b'y' => {
                if i == 0 {
                    true
                } else {
                    !self.cons(i - 1)
                }
            }
            _ => true,
        }
    }

    /// Number of vowel-consonant sequences in b[0..=j]: the "measure" m in
    /// the pattern C?(VC)^m V?.
    fn m(&self) -> u32 {
        let mut n = 0;
        let mut i = 0isize;
        // skip initial consonant run
        while i <= self.j && self.cons(i) {
            i += 1;
        }
        loop {
            // inside a vowel run
            while i <= self.j && !self.cons(i) {
                i += 1;
            }
            if i > self.j {
                return n;
            }
            n += 1;
            // inside a consonant run
            while i <= self.j && self.cons(i) {
                i += 1;
            }
            if i > self.j {
                return n;
            }
        }
    }

    fn vowel_in_stem(&self) -> bool {
        (0..=self.j).any(|i| !self.cons(i))
    }

    /// b[j-1], b[j] is a double consonant.
    fn doublec(&self, j: isize) -> bool {
        j >= 1 && self.b[j as usize] == self.b[(j - 1) as usize] && self.cons(j)
    }

    /// b[i-2..=i] is consonant-vowel-consonant with the final consonant not
    /// w, x or y. Used to decide whether to restore a trailing e, as in
    /// cav(e) or hop(e) but not snow or box.
    fn cvc(&self, i: isize) -> bool {
        if i < 2 || !self.cons(i) || self.cons(i - 1) || !self.cons(i - 2) {
            return false;
        }
        !matches!(self.b[i as usize], b'w' | b'x' | b'y')
    }

    /// Does the live word end with `s`? On a match, `j` is set to the last
    /// index of the remaining stem.
    fn ends(&mut self, s: &[u8]) -> bool {
        let len = s.len() as isize;
        if len > self.k + 1 {
            return false;
        }
        let start = (self.k + 1 - len) as usize;
        if &self.b[start..=(self.k as usize)] != s {
            return false;
        }
        self.j = self.k - len;
        true
    }

    /// Replace the matched suffix (everything after `j`) with `s`.
    fn set_to(&mut self, s: &[u8]) {
        let start = (self.j + 1) as usize;
        let end = start + s.len();
        if self.b.len() < end {
            self.b.resize(end, 0);
        }
        self.b[start..end].copy_from_slice(s);
        self.k = self.j + s.len() as isize;
    }

    fn replace_if_stem(&mut self, s: &[u8]) {
        if self.m() > 0 {
            self.set_to(s);
        }
    }

    /// Plurals and -ed / -ing: caresses -> caress, ponies -> poni,
    /// agreed -> agree, plastered -> plaster, motoring -> motor.
    fn step1ab(&mut self) {
        if self.b[self.k as usize] == b's' {
            if self.ends(b"sses") {
                self.k -= 2;
            } else if self.ends(b"ies") {
                self.set_to(b"i");
            } else if self.b[(self.k - 1) as usize] != b's' {
                self.k -= 1;
            }
        }
        if self.ends(b"eed") {
            if self.m() > 0 {
                self.k -= 1;
            }
        } else if (self.ends(b"ed") || self.ends(b"ing")) && self.vowel_in_stem() {
            self.k = self.j;
            if self.ends(b"at") {
                self.set_to(b"ate");
            } else if self.ends(b"bl") {
                self.set_to(b"ble");
            } else if self.ends(b"iz") {
                self.set_to(b"ize");
            } else if self.doublec(self.k) && !matches!(self.b[self.k as usize], b'l' | b's' | b'z')
            {
                self.k -= 1;
            } else if self.m() == 1 && self.cvc(self.k) {
                self.set_to(b"e");
            }
        }
    }

    /// Terminal y -> i when the stem holds another vowel: happy -> happi,
    /// but sky stays sky.
    fn step1c(&mut self) {
        if self.ends(b"y") && self.vowel_in_stem() {
            self.b[self.k as usize] = b'i';
        }
    }

    /// Double suffixes to single ones when the stem is non-trivial
    /// (m > 0): -ization (-ize plus -ation) -> -ize, and so on.
    fn step2(&mut self) {
        if self.k < 1 {
            return;
        }
        let penultimate = self.b[(self.k - 1) as usize];
        match penultimate {
            b'a' => {
                if self.ends(b"ational") {
                    self.replace_if_stem(b"ate");
                } else if self.ends(b"tional") {
                    self.replace_if_stem(b"tion");
                }
            }
            b'c' => {
                if self.ends(b"enci") {
                    self.replace_if_stem(b"ence");
                } else if self.ends(b"anci") {
                    self.replace_if_stem(b"ance");
                }
            }
            b'e' if self.ends(b"izer") => self.replace_if_stem(b"ize"),
            b'l' => {
                if self.ends(b"bli") {
                    self.replace_if_stem(b"ble");
                } else if self.ends(b"alli") {
                    self.replace_if_stem(b"al");
                } else if self.ends(b"entli") {
                    self.replace_if_stem(b"ent");
                } else if self.ends(b"eli") {
                    self.replace_if_stem(b"e");
                } else if self.ends(b"ousli") {
                    self.replace_if_stem(b"ous");
                }
            }
            b'o' => {
                if self.ends(b"ization") {
                    self.replace_if_stem(b"ize");
                } else if self.ends(b"ation") || self.ends(b"ator") {
                    self.replace_if_stem(b"ate");
                }
            }
            b's' => {
                if self.ends(b"alism") {
                    self.replace_if_stem(b"al");
                } else if self.ends(b"iveness") {
                    self.replace_if_stem(b"ive");
                } else if self.ends(b"fulness") {
                    self.replace_if_stem(b"ful");
                } else if self.ends(b"ousness") {
                    self.replace_if_stem(b"ous");
                }
            }
            b't' => {
                if self.ends(b"aliti") {
                    self.replace_if_stem(b"al");
                } else if self.ends(b"iviti") {
                    self.replace_if_stem(b"ive");
                } else if self.ends(b"biliti") {
                    self.replace_if_stem(b"ble");
                }
            }
            b'g' if self.ends(b"logi") => self.replace_if_stem(b"log"),
            _ => {}
        }
    }

    /// -ic-, -full, -ness and friends: triplicate -> triplic,
    /// hopeful -> hope, goodness -> good.
    fn step3(&mut self) {
        let last = self.b[self.k as usize];
        match last {
            b'e' => {
                if self.ends(b"icate") {
                    self.replace_if_stem(b"ic");
                } else if self.ends(b"ative") {
                    self.replace_if_stem(b"");
                } else if self.ends(b"alize") {
                    self.replace_if_stem(b"al");
                }
            }
            b'i' if self.ends(b"iciti") => self.replace_if_stem(b"ic"),
            b'l' => {
                if self.ends(b"ical") {
                    self.replace_if_stem(b"ic");
                } else if self.ends(b"ful") {
                    self.replace_if_stem(b"");
                }
            }
            b's' if self.ends(b"ness") => self.replace_if_stem(b""),
            _ => {}
        }
    }

    /// Drop -ant, -ence and similar endings when the stem has m > 1.
    fn step4(&mut self) {
        if self.k < 1 {
            return;
        }
        let matched = match self.b[(self.k - 1) as usize] {
            b'a' => self.ends(b"al"),
            b'c' => self.ends(b"ance") || self.ends(b"ence"),
            b'e' => self.ends(b"er"),
            b'i' => self.ends(b"ic"),
            b'l' => self.ends(b"able") || self.ends(b"ible"),
            b'n' => {
                self.ends(b"ant") || self.ends(b"ement") || self.ends(b"ment") || self.ends(b"ent")
            }
            b'o' => {
                (self.ends(b"ion") && self.j >= 0 && matches!(self.b[self.j as usize], b's' | b't'))
                    || self.ends(b"ou")
            }
            b's' => self.ends(b"ism"),
            b't' => self.ends(b"ate") || self.ends(b"iti"),
            b'u' => self.ends(b"ous"),
            b'v' => self.ends(b"ive"),
            b'z' => self.ends(b"ize"),
            _ => false,
        };
        if matched && self.m() > 1 {
            self.k = self.j;
        }
    }

    /// Remove a final -e and reduce -ll to -l on long stems:
    /// probate -> probat, controll -> control.
    fn step5(&mut self) {
        self.j = self.k;
        if self.b[self.k as usize] == b'e' {
            let a = self.m();
            if a > 1 || (a == 1 && !self.cvc(self.k - 1)) {
                self.k -= 1;
            }
        }
        if self.b[self.k as usize] == b'l' && self.doublec(self.k) && self.m() > 1 {
            self.k -= 1;
        }
    }
}
