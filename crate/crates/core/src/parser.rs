//! Recursive descent parser for the design language.
//!
//! ```text
//! unit        := (import | typedecl | entity | context | controller)*
//! import      := "import" qualifiedName ";"
//! typedecl    := "structure" Id "{" (Id "as" type ";")+ "}"
//!              | "enumeration" Id "{" Id ("," Id)* "}"
//! entity      := "entity" Id "{" (attribute | source | action)* "}"
//! attribute   := "attribute" Id "as" type ";"
//! source      := "source" Id "as" type ";"
//! action      := "action" Id "(" [Id "as" type ("," Id "as" type)*] ")" ";"
//! context     := "context" Id "as" type "{" input+ "}"
//! input       := "source" Id "from" Id ["pull"] ";"
//!              | "context" Id ["pull"] ";"
//! controller  := "controller" Id "{" input+ ("action" Id "on" Id ";")+ "}"
//! type        := ("Boolean" | "Integer" | "Float" | "String" | Id) ("[" "]")*
//! ```
//!
//! Two deliberate over-approximations: entity bodies accept `input` forms
//! and controller bodies accept every `input` form. Both are rejected by the
//! checker with a layering rule instead of a syntax error.

use std::sync::Arc;

use crate::diagnostic::ParseDiagnostic;
use crate::lexer::{tokenize, Token, TokenKind};
use crate::model::*;

const TOP_LEVEL: [&str; 6] = [
    "import",
    "structure",
    "enumeration",
    "entity",
    "context",
    "controller",
];

/// Parses `text`. Returns every syntax error found (the parser resynchronizes
/// on the next top-level keyword after an error).
pub fn parse(text: &str, file: &str) -> Result<Specification, Vec<ParseDiagnostic>> {
    let file: Arc<str> = Arc::from(file);
    let mut parser = Parser {
        tokens: tokenize(text, &file),
        pos: 0,
        diags: Vec::new(),
    };
    let spec = parser.unit();
    if parser.diags.is_empty() {
        Ok(spec)
    } else {
        Err(parser.diags)
    }
}

struct Failed;

type PResult<T> = Result<T, Failed>;

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    diags: Vec<ParseDiagnostic>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn peek_at(&self, offset: usize) -> &Token {
        &self.tokens[(self.pos + offset).min(self.tokens.len() - 1)]
    }

    fn bump(&mut self) -> Token {
        let tok = self.peek().clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        tok
    }

    fn at_word(&self, word: &str) -> bool {
        matches!(&self.peek().kind, TokenKind::Word(w) if w == word)
    }

    fn at(&self, kind: &TokenKind) -> bool {
        &self.peek().kind == kind
    }

    fn fail<T>(&mut self, expected: &[&str]) -> PResult<T> {
        let tok = self.peek().clone();
        let list = expected.join(", ");
        let message = if expected.len() == 1 {
            format!("expected {list}, found {}", tok.kind)
        } else {
            format!("expected one of {list}; found {}", tok.kind)
        };
        self.diags.push(ParseDiagnostic {
            span: tok.span,
            message,
            severity: crate::diagnostic::Severity::Error,
            expected: expected.iter().map(|s| s.to_string()).collect(),
        });
        Err(Failed)
    }

    fn expect(&mut self, kind: TokenKind, display: &str) -> PResult<Token> {
        if self.at(&kind) {
            Ok(self.bump())
        } else {
            self.fail(&[display])
        }
    }

    fn expect_word(&mut self, word: &str) -> PResult<Token> {
        if self.at_word(word) {
            Ok(self.bump())
        } else {
            self.fail(&[&format!("`{word}`")])
        }
    }

    fn ident(&mut self) -> PResult<Ident> {
        let tok = self.peek().clone();
        match &tok.kind {
            TokenKind::Word(w) if is_reserved(w) => {
                self.diags.push(ParseDiagnostic {
                    span: tok.span,
                    message: format!("reserved word `{w}` cannot be used as an identifier"),
                    severity: crate::diagnostic::Severity::Error,
                    expected: vec!["identifier".into()],
                });
                Err(Failed)
            }
            TokenKind::Word(w) if is_identifier(w) => {
                self.bump();
                Ok(Ident {
                    name: w.clone(),
                    span: tok.span,
                })
            }
            TokenKind::Word(w) => {
                self.diags.push(ParseDiagnostic {
                    span: tok.span,
                    message: format!("`{w}` is not a valid identifier"),
                    severity: crate::diagnostic::Severity::Error,
                    expected: vec!["identifier".into()],
                });
                Err(Failed)
            }
            _ => self.fail(&["identifier"]),
        }
    }

    /// Skips to the next top-level keyword outside any braces.
    fn recover(&mut self) {
        let mut depth = 0usize;
        loop {
            match &self.peek().kind {
                TokenKind::Eof => return,
                TokenKind::LBrace => depth += 1,
                TokenKind::RBrace => {
                    if depth <= 1 {
                        self.bump();
                        if depth == 1 {
                            return;
                        }
                        continue;
                    }
                    depth -= 1;
                }
                TokenKind::Word(w) if depth == 0 && TOP_LEVEL.contains(&w.as_str()) => return,
                _ => {}
            }
            self.bump();
        }
    }

    fn unit(&mut self) -> Specification {
        let mut spec = Specification::default();
        loop {
            let tok = self.peek().clone();
            let result = match &tok.kind {
                TokenKind::Eof => break,
                TokenKind::Word(w) => match w.as_str() {
                    "import" => self.import().map(|i| spec.imports.push(i)),
                    "structure" => self.structure().map(|t| spec.types.push(t)),
                    "enumeration" => self.enumeration().map(|t| spec.types.push(t)),
                    "entity" => self.entity().map(|e| spec.entities.push(e)),
                    "context" => self.context().map(|c| spec.contexts.push(c)),
                    "controller" => self.controller().map(|c| spec.controllers.push(c)),
                    _ => self.fail(&top_level_expected()),
                },
                _ => self.fail(&top_level_expected()),
            };
            if result.is_err() {
                // make progress even when the offending token is a keyword
                if self.pos == self.tokens.len() - 1 {
                    break;
                }
                let before = self.pos;
                self.recover();
                if self.pos == before {
                    self.bump();
                }
            }
        }
        spec
    }

    fn import(&mut self) -> PResult<Import> {
        let kw = self.expect_word("import")?;
        let mut segments = vec![self.ident()?.name];
        while self.at(&TokenKind::Dot) {
            self.bump();
            segments.push(self.ident()?.name);
        }
        let end = self.expect(TokenKind::Semi, "`;`")?;
        Ok(Import {
            segments,
            span: kw.span.to(&end.span),
        })
    }

    fn typed_name(&mut self) -> PResult<TypedName> {
        let name = self.ident()?;
        self.expect_word("as")?;
        let ty = self.type_expr()?;
        let span = name.span.to(ty.span());
        Ok(TypedName { name, ty, span })
    }

    fn type_expr(&mut self) -> PResult<TypeExpr> {
        let tok = self.peek().clone();
        let mut ty = match &tok.kind {
            TokenKind::Word(w) => match PrimitiveKind::from_keyword(w) {
                Some(kind) => {
                    self.bump();
                    TypeExpr::Primitive(kind, tok.span)
                }
                None if is_identifier(w) && !is_reserved(w) => TypeExpr::Named(self.ident()?),
                None => return self.fail(&["type"]),
            },
            _ => return self.fail(&["type"]),
        };
        while self.at(&TokenKind::LBracket) {
            self.bump();
            let close = self.expect(TokenKind::RBracket, "`]`")?;
            let span = ty.span().to(&close.span);
            ty = TypeExpr::Array(Box::new(ty), span);
        }
        Ok(ty)
    }

    fn structure(&mut self) -> PResult<TypeDecl> {
        let kw = self.expect_word("structure")?;
        let name = self.ident()?;
        self.expect(TokenKind::LBrace, "`{`")?;
        let mut fields = Vec::new();
        loop {
            let field = self.typed_name()?;
            self.expect(TokenKind::Semi, "`;`")?;
            fields.push(field);
            if self.at(&TokenKind::RBrace) {
                break;
            }
        }
        let end = self.bump();
        Ok(TypeDecl::Structure {
            name,
            fields,
            span: kw.span.to(&end.span),
        })
    }

    fn enumeration(&mut self) -> PResult<TypeDecl> {
        let kw = self.expect_word("enumeration")?;
        let name = self.ident()?;
        self.expect(TokenKind::LBrace, "`{`")?;
        let mut labels = vec![self.ident()?];
        while self.at(&TokenKind::Comma) {
            self.bump();
            labels.push(self.ident()?);
        }
        let end = self.expect(TokenKind::RBrace, "`}`")?;
        Ok(TypeDecl::Enumeration {
            name,
            labels,
            span: kw.span.to(&end.span),
        })
    }

    fn pull_and_semi(&mut self) -> PResult<(Interaction, Token)> {
        let interaction = if self.at_word("pull") {
            self.bump();
            Interaction::Pull
        } else {
            Interaction::Push
        };
        let end = if interaction == Interaction::Push {
            if self.at(&TokenKind::Semi) {
                self.bump()
            } else {
                return self.fail(&["`pull`", "`;`"]);
            }
        } else {
            self.expect(TokenKind::Semi, "`;`")?
        };
        Ok((interaction, end))
    }

    /// `source Id from Id [pull];` or `context Id [pull];`, with the
    /// leading keyword already known to be present.
    fn input(&mut self) -> PResult<InputBinding> {
        if self.at_word("source") {
            let kw = self.bump();
            let source = self.ident()?;
            self.expect_word("from")?;
            let class = self.ident()?;
            let (interaction, end) = self.pull_and_semi()?;
            Ok(InputBinding {
                kind: InputKind::EntitySource { source, class },
                interaction,
                span: kw.span.to(&end.span),
            })
        } else {
            let kw = self.expect_word("context")?;
            let context = self.ident()?;
            let (interaction, end) = self.pull_and_semi()?;
            Ok(InputBinding {
                kind: InputKind::ContextOutput { context },
                interaction,
                span: kw.span.to(&end.span),
            })
        }
    }

    fn entity(&mut self) -> PResult<EntityClass> {
        let kw = self.expect_word("entity")?;
        let name = self.ident()?;
        self.expect(TokenKind::LBrace, "`{`")?;
        let mut class = EntityClass {
            name,
            attributes: Vec::new(),
            sources: Vec::new(),
            actions: Vec::new(),
            inputs: Vec::new(),
            span: kw.span.clone(),
        };
        loop {
            if self.at(&TokenKind::RBrace) {
                let end = self.bump();
                class.span = kw.span.to(&end.span);
                return Ok(class);
            }
            if self.at_word("attribute") {
                let kw = self.bump();
                let mut attr = self.typed_name()?;
                let end = self.expect(TokenKind::Semi, "`;`")?;
                attr.span = kw.span.to(&end.span);
                class.attributes.push(attr);
            } else if self.at_word("source") {
                if matches!(&self.peek_at(2).kind, TokenKind::Word(w) if w == "from") {
                    class.inputs.push(self.input()?);
                } else {
                    let kw = self.bump();
                    let mut source = self.typed_name()?;
                    let end = self.expect(TokenKind::Semi, "`;`")?;
                    source.span = kw.span.to(&end.span);
                    class.sources.push(source);
                }
            } else if self.at_word("context") {
                class.inputs.push(self.input()?);
            } else if self.at_word("action") {
                class.actions.push(self.action_sig()?);
            } else {
                return self.fail(&["`attribute`", "`source`", "`action`", "`}`"]);
            }
        }
    }

    fn action_sig(&mut self) -> PResult<ActionSig> {
        let kw = self.expect_word("action")?;
        let name = self.ident()?;
        self.expect(TokenKind::LParen, "`(`")?;
        let mut params = Vec::new();
        if !self.at(&TokenKind::RParen) {
            params.push(self.typed_name()?);
            while self.at(&TokenKind::Comma) {
                self.bump();
                params.push(self.typed_name()?);
            }
        }
        if !self.at(&TokenKind::RParen) {
            return self.fail(&["`,`", "`)`"]);
        }
        self.bump();
        let end = self.expect(TokenKind::Semi, "`;`")?;
        Ok(ActionSig {
            name,
            params,
            span: kw.span.to(&end.span),
        })
    }

    fn context(&mut self) -> PResult<ContextOperator> {
        let kw = self.expect_word("context")?;
        let name = self.ident()?;
        self.expect_word("as")?;
        let output = self.type_expr()?;
        self.expect(TokenKind::LBrace, "`{`")?;
        let mut inputs = Vec::new();
        loop {
            if self.at_word("source") || self.at_word("context") {
                inputs.push(self.input()?);
            } else if !inputs.is_empty() && self.at(&TokenKind::RBrace) {
                let end = self.bump();
                return Ok(ContextOperator {
                    name,
                    output,
                    inputs,
                    span: kw.span.to(&end.span),
                });
            } else if inputs.is_empty() {
                return self.fail(&["`source`", "`context`"]);
            } else {
                return self.fail(&["`source`", "`context`", "`}`"]);
            }
        }
    }

    fn controller(&mut self) -> PResult<ControlOperator> {
        let kw = self.expect_word("controller")?;
        let name = self.ident()?;
        self.expect(TokenKind::LBrace, "`{`")?;
        let mut inputs = Vec::new();
        while self.at_word("source") || self.at_word("context") {
            inputs.push(self.input()?);
        }
        if inputs.is_empty() {
            return self.fail(&["`context`"]);
        }
        let mut actions = Vec::new();
        loop {
            if self.at_word("action") {
                let kw = self.bump();
                let action = self.ident()?;
                self.expect_word("on")?;
                let entity = self.ident()?;
                let end = self.expect(TokenKind::Semi, "`;`")?;
                actions.push(ActionBinding {
                    action,
                    entity,
                    span: kw.span.to(&end.span),
                });
            } else if !actions.is_empty() && self.at(&TokenKind::RBrace) {
                let end = self.bump();
                return Ok(ControlOperator {
                    name,
                    inputs,
                    actions,
                    span: kw.span.to(&end.span),
                });
            } else if actions.is_empty() {
                return self.fail(&["`context`", "`action`"]);
            } else {
                return self.fail(&["`action`", "`}`"]);
            }
        }
    }
}

fn top_level_expected() -> Vec<&'static str> {
    vec![
        "`import`",
        "`structure`",
        "`enumeration`",
        "`entity`",
        "`context`",
        "`controller`",
    ]
}
