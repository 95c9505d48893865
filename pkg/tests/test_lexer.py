import pytest

from topicsum.corpus.lexer import extract_classes, tokenize
from topicsum.errors import ParseError

JSON_VALUE = """
public class JsonValue {
  /** Writes the json representation of this value to the given writer. */
  void writeTo(Writer writer) { writer.write(toString()); }
}
"""


def test_single_class_with_documented_method():
    classes = extract_classes(JSON_VALUE, path="JsonValue.java")
    assert len(classes) == 1
    cls = classes[0]
    assert cls.class_name == "JsonValue"
    assert cls.path == "JsonValue.java"
    assert [m.method_name for m in cls.methods] == ["writeTo"]
    assert cls.methods[0].doc_comment is not None
    assert "Writes the json representation" in cls.methods[0].doc_comment


def test_empty_input_yields_no_classes():
    assert extract_classes("") == []


def test_source_without_classes_yields_no_classes():
    assert extract_classes("int x = 1;") == []


def test_undocumented_method_is_still_extracted():
    src = """
    class Pair {
      /** Returns the first element of this pair. */
      int first() { return a; }
      int second() { return b; }
    }
    """
    (cls,) = extract_classes(src)
    assert [m.method_name for m in cls.methods] == ["first", "second"]
    assert cls.methods[0].doc_comment is not None
    assert cls.methods[1].doc_comment is None


def test_comment_text_never_reaches_class_tokens():
    src = """
    class Widget {
      /** A zebra lives here. */
      // another zebra
      /* zebra again */
      void paint() { render(); }
    }
    """
    (cls,) = extract_classes(src)
    assert "zebra" not in cls.class_tokens
    assert all("zebra" not in t for m in cls.methods for t in m.code_tokens)


def test_nested_class_is_flattened_into_outer_document():
    src = """
    class Outer {
      int outerField;
      static class Inner {
        /** Runs the inner machinery. */
        void innerRun() { tick(); }
      }
      void outerRun() { }
    }
    """
    classes = extract_classes(src)
    assert [c.class_name for c in classes] == ["Outer"]
    names = {m.method_name for m in classes[0].methods}
    assert names == {"innerRun", "outerRun"}
    assert "inner" in classes[0].class_tokens


def test_two_top_level_classes():
    src = "class A { void f() {} } class B { void g() {} }"
    classes = extract_classes(src)
    assert [c.class_name for c in classes] == ["A", "B"]


def test_constructor_counts_as_method():
    src = "class Point { Point(int x) { this.x = x; } }"
    (cls,) = extract_classes(src)
    assert [m.method_name for m in cls.methods] == ["Point"]


def test_interface_declarations_without_bodies_are_skipped():
    src = "interface Shape { int area(); int perimeter(); }"
    (cls,) = extract_classes(src)
    assert cls.class_name == "Shape"
    assert cls.methods == []


def test_field_initializer_call_is_not_a_method():
    src = "class C { int x = compute(3); void real() {} }"
    (cls,) = extract_classes(src)
    assert [m.method_name for m in cls.methods] == ["real"]


def test_annotation_between_doc_and_method_keeps_the_doc():
    src = """
    class C {
      /** Does the thing with great care. */
      @Override
      public void doThing() { }
    }
    """
    (cls,) = extract_classes(src)
    assert cls.methods[0].doc_comment is not None


def test_method_calls_inside_bodies_are_not_methods():
    src = """
    class C {
      void outer() {
        helper(1);
        other.call(2);
        if (x) { nested(3); }
      }
    }
    """
    (cls,) = extract_classes(src)
    assert [m.method_name for m in cls.methods] == ["outer"]


def test_unbalanced_close_brace_reports_offset():
    src = "class A { } }"
    with pytest.raises(ParseError) as excinfo:
        extract_classes(src)
    assert excinfo.value.offset == src.rindex("}")


def test_unclosed_brace_reports_offset():
    src = "class A { void f() {"
    with pytest.raises(ParseError) as excinfo:
        extract_classes(src)
    assert excinfo.value.offset in (src.index("{"), src.rindex("{"))


def test_unterminated_block_comment_reports_offset():
    src = "class A { /* never ends"
    with pytest.raises(ParseError) as excinfo:
        extract_classes(src)
    assert excinfo.value.offset == src.index("/*")


def test_braces_inside_strings_do_not_confuse_balance():
    src = 'class A { String s = "{{{"; void f() {} }'
    (cls,) = extract_classes(src)
    assert [m.method_name for m in cls.methods] == ["f"]


def test_extraction_is_deterministic():
    assert extract_classes(JSON_VALUE) == extract_classes(JSON_VALUE)


def test_tokenizer_attaches_doc_to_following_token_index():
    tokens, docs = tokenize("/** doc */ void f() {}")
    assert list(docs) == [0]
    assert tokens[0].text == "void"


def test_string_literal_contents_become_words():
    src = 'class A { String fmt = "speex packet"; void f() {} }'
    (cls,) = extract_classes(src)
    assert "speex" in cls.class_tokens
    assert "packet" in cls.class_tokens
