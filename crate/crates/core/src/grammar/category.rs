use std::fmt;

use serde::{Deserialize, Serialize};

/// A categorial-grammar category: a base name, `A/B` (seeks `B` to the
/// right, yields `A`) or `B\A` (seeks `B` to the left, yields `A`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Category {
    Base {
        name: String,
    },
    Slash {
        result: Box<Category>,
        arg: Box<Category>,
    },
    Backslash {
        arg: Box<Category>,
        result: Box<Category>,
    },
}

impl Category {
    pub fn base(name: impl Into<String>) -> Self {
        Category::Base { name: name.into() }
    }

    /// `result/arg`
    pub fn slash(result: Category, arg: Category) -> Self {
        Category::Slash {
            result: Box::new(result),
            arg: Box::new(arg),
        }
    }

    /// `arg\result`
    pub fn backslash(arg: Category, result: Category) -> Self {
        Category::Backslash {
            arg: Box::new(arg),
            result: Box::new(result),
        }
    }

    pub fn is_base(&self) -> bool {
        matches!(self, Category::Base { .. })
    }

    /// Base names in left-to-right order, with repetitions.
    pub fn base_names(&self) -> Vec<&str> {
        let mut out = Vec::new();
        fn go<'a>(c: &'a Category, out: &mut Vec<&'a str>) {
            match c {
                Category::Base { name } => out.push(name),
                Category::Slash { result, arg } => {
                    go(result, out);
                    go(arg, out);
                }
                Category::Backslash { arg, result } => {
                    go(arg, out);
                    go(result, out);
                }
            }
        }
        go(self, &mut out);
        out
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn part(c: &Category, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            if c.is_base() {
                write!(f, "{c}")
            } else {
                write!(f, "({c})")
            }
        }
        match self {
            Category::Base { name } => f.write_str(name),
            Category::Slash { result, arg } => {
                part(result, f)?;
                f.write_str("/")?;
                part(arg, f)
            }
            Category::Backslash { arg, result } => {
                part(arg, f)?;
                f.write_str("\\")?;
                part(result, f)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_parenthesizes_complex_parts() {
        let c = Category::backslash(
            Category::base("np"),
            Category::slash(
                Category::backslash(Category::base("tv"), Category::base("iv")),
                Category::base("np"),
            ),
        );
        assert_eq!(c.to_string(), "np\\((tv\\iv)/np)");
        assert_eq!(c.base_names(), vec!["np", "tv", "iv", "np"]);
    }
}
