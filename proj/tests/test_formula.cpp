#include <catch2/catch_amalgamated.hpp>

#include "ltlsem/parse.hpp"
#include "ltlsem/word.hpp"

#include "generators.hpp"

using namespace ltlsem;

TEST_CASE("parse builds canonical terms") {
  Formula f = parse("F r & F G y");
  REQUIRE(f.op() == Op::And);
  REQUIRE(f.children().size() == 2);
  REQUIRE(f.child(0) == Formula::finally(Formula::atom("r")));
  REQUIRE(f.child(1) == Formula::finally(Formula::globally(Formula::atom("y"))));

  REQUIRE(parse("true") == Formula::tt());
  REQUIRE(parse("!(a | b) U c") ==
          Formula::until(Formula::negate(Formula::disj({Formula::atom("a"), Formula::atom("b")})),
                         Formula::atom("c")));
}

TEST_CASE("parse desugars implication") {
  REQUIRE(parse("a -> b") == parse("!a | b"));
  REQUIRE(parse("a -> b -> c") == parse("!a | !b | c"));
}

TEST_CASE("parse precedence") {
  REQUIRE(parse("a U b & c") == parse("(a U b) & c"));
  REQUIRE(parse("a & b | c") == parse("(a & b) | c"));
  REQUIRE(parse("a U b U c") == parse("a U (b U c)"));
  REQUIRE(parse("F a | b") == parse("(F a) | b"));
}

TEST_CASE("parse errors carry a position") {
  REQUIRE_THROWS_AS(parse("a &"), ParseError);
  REQUIRE_THROWS_AS(parse("(a"), ParseError);
  REQUIRE_THROWS_AS(parse("a W b"), ParseError);  // unknown operator
  try {
    parse("a W b");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    REQUIRE(e.position == 2);
    REQUIRE(std::string(e.what()).find("unknown operator") != std::string::npos);
  }
}

TEST_CASE("render golden forms") {
  REQUIRE(render(Formula::tt()) == "true");
  REQUIRE(render(Formula::conj({parse("F a"), parse("G b")})) == "(F a) & (G b)");
  REQUIRE(render(Formula::until(Formula::negate(Formula::atom("a")), Formula::atom("b"))) ==
          "(!a) U b");
  REQUIRE(render(parse("F G y")) == "F G y");
}

TEST_CASE("canonical constructors") {
  // flattening, dedup, ordering, constant folding
  Formula a = Formula::atom("a");
  REQUIRE(Formula::conj({a, a}) == a);
  REQUIRE(Formula::conj({a, Formula::tt()}) == a);
  REQUIRE(Formula::conj({a, Formula::ff()}) == Formula::ff());
  REQUIRE(Formula::disj({a, Formula::tt()}) == Formula::tt());
  REQUIRE(Formula::disj({a, Formula::ff()}) == a);
  Formula nested = Formula::conj({a, Formula::conj({Formula::atom("b"), Formula::atom("c")})});
  REQUIRE(nested.children().size() == 3);
  REQUIRE(Formula::until(Formula::tt(), a) == Formula::finally(a));
}

TEST_CASE("canonicalize golden examples") {
  REQUIRE(canonicalize(Formula::disj({parse("G y"), parse("F G y")})) == parse("F G y"));
  REQUIRE(canonicalize(Formula::conj({parse("a"), parse("a")})) == parse("a"));
  REQUIRE(canonicalize(Formula::disj({parse("F(r & F G y)"), parse("F G y")})) == parse("F G y"));
  REQUIRE(canonicalize(Formula::negate(Formula::negate(parse("a")))) == parse("a"));
  REQUIRE(canonicalize(Formula::finally(parse("F a"))) == parse("F a"));
  REQUIRE(canonicalize(Formula::globally(parse("G a"))) == parse("G a"));
}

TEST_CASE("canonicalize collapse agrees with the lasso oracle on small words") {
  // or(F(r & FG y), FG y) == FG y over every lasso with |u|,|v| <= 3
  Formula lhs = Formula::disj({parse("F(r & F G y)"), parse("F G y")});
  Formula rhs = parse("F G y");
  Alphabet alphabet = full_alphabet({"r", "y"});
  std::vector<std::vector<Letter>> words_by_len{{}};
  for (int len = 1; len <= 3; ++len) {
    // enumerate all letter sequences of this length
    std::vector<std::vector<Letter>> seqs;
    std::vector<Letter> cur;
    auto rec = [&](auto&& self, int remaining) -> void {
      if (remaining == 0) {
        seqs.push_back(cur);
        return;
      }
      for (const Letter& sigma : alphabet) {
        cur.push_back(sigma);
        self(self, remaining - 1);
        cur.pop_back();
      }
    };
    rec(rec, len);
    for (auto& s : seqs) words_by_len.push_back(std::move(s));
  }
  for (const auto& prefix : words_by_len)
    for (const auto& loop : words_by_len) {
      if (loop.empty()) continue;
      LassoWord w(prefix, loop);
      REQUIRE(eval_lasso(w, lhs) == eval_lasso(w, rhs));
    }
}

TEST_CASE("implies_syntactic rules") {
  REQUIRE(implies_syntactic(parse("G y"), parse("F G y")));
  REQUIRE(implies_syntactic(parse("F(r & F G y)"), parse("F G y")));
  REQUIRE_FALSE(implies_syntactic(parse("F r"), parse("G r")));
  REQUIRE(implies_syntactic(parse("G a"), parse("a")));
  REQUIRE(implies_syntactic(parse("a"), parse("F a")));
  REQUIRE(implies_syntactic(parse("G a"), parse("F a")));
  REQUIRE(implies_syntactic(parse("G F a"), parse("F a")));
  REQUIRE(implies_syntactic(parse("a & b"), parse("a")));
  REQUIRE(implies_syntactic(parse("a"), parse("a | b")));
  REQUIRE(implies_syntactic(parse("X (a & b)"), parse("X a")));
  REQUIRE(implies_syntactic(parse("a U b"), parse("F b")));
  REQUIRE(implies_syntactic(parse("b"), parse("a U b")));
}

TEST_CASE("eval_lasso basics") {
  Formula gfa = parse("G F a");
  REQUIRE_FALSE(eval_lasso(LassoWord({}, {Letter{}}), gfa));
  REQUIRE(eval_lasso(LassoWord({}, {Letter{"a"}, Letter{}}), gfa));
  Formula phi = parse("F r & F G y");
  REQUIRE(eval_lasso(LassoWord({Letter{"r"}}, {Letter{"y"}}), phi));
  REQUIRE_FALSE(eval_lasso(LassoWord({Letter{"r"}}, {Letter{}}), phi));
}

TEST_CASE("property: parse(render(f)) round trip") {
  Rng rng(11);
  std::vector<std::string> ap{"a", "b", "c"};
  for (int t = 0; t < 500; ++t) {
    Formula f = canonicalize(testgen::rand_formula(rng, ap, 4));
    REQUIRE(parse(render(f)) == f);
  }
}

TEST_CASE("property: canonicalize is idempotent and preserves semantics") {
  Rng rng(12);
  std::vector<std::string> ap{"a", "b", "c"};
  Alphabet alphabet = full_alphabet(ap);
  for (int t = 0; t < 1000; ++t) {
    Formula f = testgen::rand_formula(rng, ap, 4);
    Formula c = canonicalize(f);
    REQUIRE(canonicalize(c) == c);
    LassoWord w = testgen::rand_lasso(rng, alphabet, 4, 4);
    REQUIRE(eval_lasso(w, f) == eval_lasso(w, c));
  }
}

TEST_CASE("property: implies_syntactic is sound") {
  Rng rng(13);
  std::vector<std::string> ap{"a", "b", "c"};
  Alphabet alphabet = full_alphabet(ap);
  int positives = 0;
  for (int t = 0; t < 2000; ++t) {
    Formula f = testgen::rand_formula(rng, ap, 3);
    Formula g = testgen::rand_formula(rng, ap, 3);
    if (!implies_syntactic(f, g)) continue;
    ++positives;
    for (int i = 0; i < 20; ++i) {
      LassoWord w = testgen::rand_lasso(rng, alphabet, 3, 3);
      if (eval_lasso(w, f)) REQUIRE(eval_lasso(w, g));
    }
  }
  REQUIRE(positives > 50);  // the check must actually fire
}

TEST_CASE("property: eval_lasso duality") {
  Rng rng(14);
  std::vector<std::string> ap{"a", "b"};
  Alphabet alphabet = full_alphabet(ap);
  for (int t = 0; t < 500; ++t) {
    Formula f = testgen::rand_formula(rng, ap, 4);
    LassoWord w = testgen::rand_lasso(rng, alphabet, 4, 4);
    REQUIRE(eval_lasso(w, Formula::negate(f)) == !eval_lasso(w, f));
    REQUIRE(eval_lasso(w, Formula::globally(f)) ==
            !eval_lasso(w, Formula::finally(Formula::negate(f))));
  }
}

TEST_CASE("lasso loop must be nonempty") {
  REQUIRE_THROWS_AS(LassoWord({Letter{"a"}}, {}), std::invalid_argument);
}
