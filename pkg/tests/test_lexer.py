import pytest
from hypothesis import given, strategies as st

from hoc.lexer import KEYWORDS, LexError, tokenize

from conftest import corpus_files


def kinds(src):
    return [(t.kind, t.canon) for t in tokenize(src)[:-1]]


def test_hex_literal_value():
    tok = tokenize("80000100h")[0]
    assert tok.kind == "int" and tok.value == 0x80000100


def test_comment_then_keyword():
    toks = tokenize("(* note *) MODULE")
    assert [(t.kind, t.text) for t in toks[:-1]] == [("kw", "MODULE")]


def test_char_literal():
    tok = tokenize("'A'")[0]
    assert tok.kind == "int" and tok.value == 65


def test_mixed_case_keyword_is_identifier():
    tok = tokenize("If")[0]
    assert tok.kind == "id" and tok.text == "If"


@pytest.mark.parametrize("kw", sorted(KEYWORDS))
def test_keyword_both_casings(kw):
    up = tokenize(kw)[0]
    low = tokenize(kw.lower())[0]
    assert up.kind == "kw" and low.kind == "kw"
    assert up.canon == low.canon == kw
    title = kw.title()
    if title not in (kw, kw.lower()):
        assert tokenize(title)[0].kind == "id"


def test_hex_needs_leading_digit():
    # FFh lexes as an identifier; 0FFh is 255
    assert tokenize("FFh")[0].kind == "id"
    assert tokenize("0FFh")[0].value == 255


def test_decimal_with_hex_digits_no_suffix_is_malformed():
    with pytest.raises(LexError) as e:
        tokenize("1AB")
    assert e.value.message == "malformed number"


def test_multi_char_literal_rejected():
    with pytest.raises(LexError) as e:
        tokenize("'ab'")
    assert e.value.message == "malformed number"


def test_literal_overflow():
    tokenize("4294967295")  # max u32 is fine
    with pytest.raises(LexError) as e:
        tokenize("4294967296")
    assert e.value.message == "literal overflow"


def test_unterminated_comment():
    with pytest.raises(LexError) as e:
        tokenize("(* no end")
    assert e.value.message == "unterminated comment"


def test_comments_do_not_nest():
    # the first *) closes the comment even after an inner (*
    toks = tokenize("(* a (* b *) MODULE")
    assert toks[0].canon == "MODULE"


def test_unterminated_string():
    with pytest.raises(LexError) as e:
        tokenize('"no end')
    assert e.value.message == "unterminated string"


def test_string_no_newline():
    with pytest.raises(LexError):
        tokenize('"line\nbreak"')


def test_illegal_character():
    with pytest.raises(LexError) as e:
        tokenize("a ` b")
    assert e.value.message == "illegal character"


def test_locations_point_at_first_char():
    toks = tokenize("ab\n  cd", "f")
    assert (toks[0].loc.line, toks[0].loc.col) == (1, 1)
    assert (toks[1].loc.line, toks[1].loc.col) == (2, 3)


def test_multichar_operators():
    src = ":= .. << >> <= >= /\\ \\/ ><"
    assert [t.text for t in tokenize(src)[:-1]] == src.split()


@pytest.mark.parametrize("path", corpus_files("pos"))
def test_spans_reconstruct_source(path):
    with open(path) as f:
        src = f.read()
    toks = tokenize(src, path)
    # every span is exact, and spans plus the skipped gaps rebuild the source
    out = []
    prev = 0
    for t in toks:
        assert src[t.offset:t.offset + len(t.text)] == t.text
        out.append(src[prev:t.offset])
        out.append(t.text)
        prev = t.offset + len(t.text)
    out.append(src[prev:])
    assert "".join(out) == src


@given(st.text(alphabet=st.characters(min_codepoint=32, max_codepoint=126), max_size=80))
def test_tokenize_is_pure(src):
    try:
        first = tokenize(src)
    except LexError as e:
        with pytest.raises(LexError) as e2:
            tokenize(src)
        assert str(e2.value) == str(e)
        return
    second = tokenize(src)
    assert first == second
    for t in first:
        assert src[t.offset:t.offset + len(t.text)] == t.text
