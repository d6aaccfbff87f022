//! Minimal s-expression reader with source positions.

use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sexp {
    Sym(String, Pos),
    List(Vec<Sexp>, Pos),
}

impl Sexp {
    pub fn pos(&self) -> Pos {
        match self {
            Sexp::Sym(_, p) | Sexp::List(_, p) => *p,
        }
    }

    pub fn as_sym(&self) -> Option<&str> {
        match self {
            Sexp::Sym(s, _) => Some(s),
            Sexp::List(..) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(v, _) => Some(v),
            Sexp::Sym(..) => None,
        }
    }

    /// Head symbol of a list form.
    pub fn head(&self) -> Option<&str> {
        self.as_list().and_then(|v| v.first()).and_then(Sexp::as_sym)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{pos}: {msg}")]
pub struct SyntaxError {
    pub pos: Pos,
    pub msg: String,
}

impl SyntaxError {
    pub fn new(pos: Pos, msg: impl Into<String>) -> Self {
        SyntaxError {
            pos,
            msg: msg.into(),
        }
    }
}

/// Reads every form in `text`. A double-quoted string reads as one symbol.
pub fn read_all(text: &str) -> Result<Vec<Sexp>, SyntaxError> {
    let mut stack: Vec<(Vec<Sexp>, Pos)> = vec![(Vec::new(), Pos { line: 1, col: 1 })];
    let mut line = 1;
    let mut col = 1;
    let mut chars = text.chars().peekable();
    let mut sym = String::new();
    let mut sym_pos = Pos { line, col };

    fn flush(sym: &mut String, pos: Pos, stack: &mut [(Vec<Sexp>, Pos)]) {
        if !sym.is_empty() {
            stack.last_mut().unwrap().0.push(Sexp::Sym(std::mem::take(sym), pos));
        }
    }

    while let Some(c) = chars.next() {
        let here = Pos { line, col };
        if c == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
        match c {
            ';' => {
                flush(&mut sym, sym_pos, &mut stack);
                while let Some(&n) = chars.peek() {
                    if n == '\n' {
                        break;
                    }
                    chars.next();
                    col += 1;
                }
            }
            '(' => {
                flush(&mut sym, sym_pos, &mut stack);
                stack.push((Vec::new(), here));
            }
            ')' => {
                flush(&mut sym, sym_pos, &mut stack);
                if stack.len() == 1 {
                    return Err(SyntaxError::new(here, "unbalanced ')'"));
                }
                let (items, p) = stack.pop().unwrap();
                stack.last_mut().unwrap().0.push(Sexp::List(items, p));
            }
            '"' => {
                flush(&mut sym, sym_pos, &mut stack);
                let mut text = String::new();
                loop {
                    let Some(n) = chars.next() else {
                        return Err(SyntaxError::new(here, "unterminated string"));
                    };
                    col += 1;
                    match n {
                        '"' => break,
                        '\\' => {
                            let Some(e) = chars.next() else {
                                return Err(SyntaxError::new(here, "unterminated string"));
                            };
                            col += 1;
                            text.push(e);
                        }
                        '\n' => {
                            line += 1;
                            col = 1;
                            text.push(n);
                        }
                        _ => text.push(n),
                    }
                }
                stack.last_mut().unwrap().0.push(Sexp::Sym(text, here));
            }
            c if c.is_whitespace() => flush(&mut sym, sym_pos, &mut stack),
            c => {
                if sym.is_empty() {
                    sym_pos = here;
                }
                sym.push(c);
            }
        }
    }
    flush(&mut sym, sym_pos, &mut stack);
    if stack.len() > 1 {
        let (_, p) = stack.pop().unwrap();
        return Err(SyntaxError::new(p, "unclosed '('"));
    }
    Ok(stack.pop().unwrap().0)
}

/// Cursor over the items of one list form.
pub struct Items<'a> {
    items: &'a [Sexp],
    at: usize,
    pos: Pos,
}

impl<'a> Items<'a> {
    /// Opens `form`, which must be a list headed by `head`.
    pub fn open(form: &'a Sexp, head: &str) -> Result<Self, SyntaxError> {
        match form {
            Sexp::List(v, p) if form.head() == Some(head) => Ok(Items {
                items: v,
                at: 1,
                pos: *p,
            }),
            _ => Err(SyntaxError::new(form.pos(), format!("expected ({head} ...)"))),
        }
    }

    pub fn pos(&self) -> Pos {
        self.items.get(self.at).map(Sexp::pos).unwrap_or(self.pos)
    }

    pub fn peek(&self) -> Option<&'a Sexp> {
        self.items.get(self.at)
    }

    pub fn next(&mut self) -> Option<&'a Sexp> {
        let s = self.items.get(self.at);
        if s.is_some() {
            self.at += 1;
        }
        s
    }

    pub fn done(&self) -> bool {
        self.at >= self.items.len()
    }

    pub fn sym(&mut self, what: &str) -> Result<&'a str, SyntaxError> {
        let pos = self.pos();
        match self.next() {
            Some(Sexp::Sym(s, _)) => Ok(s),
            _ => Err(SyntaxError::new(pos, format!("expected {what}"))),
        }
    }

    pub fn list(&mut self, what: &str) -> Result<&'a [Sexp], SyntaxError> {
        let pos = self.pos();
        match self.next() {
            Some(Sexp::List(v, _)) => Ok(v),
            _ => Err(SyntaxError::new(pos, format!("expected list of {what}"))),
        }
    }

    pub fn keyword(&mut self, kw: &str) -> Result<(), SyntaxError> {
        let pos = self.pos();
        match self.next() {
            Some(Sexp::Sym(s, _)) if s == kw => Ok(()),
            _ => Err(SyntaxError::new(pos, format!("expected {kw}"))),
        }
    }

    /// Consumes `kw` if it is next.
    pub fn optional_keyword(&mut self, kw: &str) -> bool {
        if self.peek().and_then(Sexp::as_sym) == Some(kw) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    pub fn peek_head(&self) -> Option<&'a str> {
        self.peek().and_then(Sexp::head)
    }

    pub fn finish(&self) -> Result<(), SyntaxError> {
        if self.done() {
            Ok(())
        } else {
            Err(SyntaxError::new(self.pos(), "unexpected trailing item"))
        }
    }
}

/// Writes `s` as a double-quoted string.
pub fn quote(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_nested_lists_with_positions() {
        let forms = read_all("(a (b c)\n  ; note\n d)").unwrap();
        assert_eq!(forms.len(), 1);
        let items = forms[0].as_list().unwrap();
        assert_eq!(items[0].as_sym(), Some("a"));
        assert_eq!(items[2].as_sym(), Some("d"));
        assert_eq!(items[2].pos(), Pos { line: 3, col: 2 });
    }

    #[test]
    fn reports_unbalanced_input() {
        assert!(read_all("(a (b)").is_err());
        let e = read_all("a)").unwrap_err();
        assert_eq!(e.pos, Pos { line: 1, col: 2 });
    }

    #[test]
    fn strings_read_as_one_symbol() {
        let text = format!("(note {})", quote("a (b) \"c\""));
        let forms = read_all(&text).unwrap();
        assert_eq!(forms[0].as_list().unwrap()[1].as_sym(), Some("a (b) \"c\""));
        assert!(read_all("(\"open").is_err());
    }
}
