from topicsum.corpus.comments import extract_summary

FULL_COMMENT = (
    "/** Writes the json representation of this value to the given writer "
    "in its minimal form without any additional whitespace. */"
)


def test_first_sentence_lowercased_without_trailing_period():
    assert extract_summary(FULL_COMMENT) == (
        "writes the json representation of this value to the given writer "
        "in its minimal form without any additional whitespace"
    )


def test_tag_only_comment_has_no_summary():
    assert extract_summary("/** @param x */") is None


def test_only_first_sentence_is_kept():
    assert extract_summary("/** Creates X. Also does Y. */") == "creates x"


def test_block_tags_cut_the_description():
    comment = """/**
     * Returns the size of the backing store.
     * @return the size
     * @throws IllegalStateException never
     */"""
    assert extract_summary(comment) == "returns the size of the backing store"


def test_leading_stars_are_stripped():
    comment = "/**\n * Computes the\n * rolling checksum.\n */"
    assert extract_summary(comment) == "computes the rolling checksum"


def test_inline_tags_keep_their_content():
    comment = "/** Copies {@code buffer} into the {@link Sink target sink}. */"
    assert extract_summary(comment) == "copies buffer into the sink target sink"


def test_html_markup_is_removed():
    comment = "/** Renders the <b>bold</b> title<p>More details here.</p> */"
    summary = extract_summary(comment)
    assert summary is not None
    assert summary.startswith("renders the bold title")
    assert "<" not in summary


def test_single_word_comment_is_rejected():
    assert extract_summary("/** Closes. */") is None


def test_plain_text_without_comment_markers_is_accepted():
    assert extract_summary("Reads bytes from the stream.") == (
        "reads bytes from the stream"
    )
