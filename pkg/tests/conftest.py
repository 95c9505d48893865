import pytest

JAVA_SOURCES = {
    "audio/Audio.java": """
public class Audio {
  /** Creates the appropriate link speex packet. */
  Packet create(Ogg ogg) { return new Packet(ogg, speexCodec); }

  /** Returns the sample rate of the audio stream. */
  int sampleRate() { return rate; }
}
""",
    "json/JsonValue.java": """
public class JsonValue {
  /** Writes the json representation of this value to the given writer. */
  void writeTo(Writer writer) { writer.write(toJsonString()); }

  /** Returns the number of json values held inside. */
  int size() { return values.size(); }
}
""",
    "json/JsonArray.java": """
public class JsonArray {
  /** Appends the given json value to the array. */
  void add(JsonValue value) { values.add(value); }

  int undocumented() { return 0; }
}
""",
    "Broken.java": "class Broken {",
}


@pytest.fixture()
def java_tree(tmp_path):
    root = tmp_path / "src"
    for rel, text in JAVA_SOURCES.items():
        target = root / rel
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text, encoding="utf-8")
    return root
