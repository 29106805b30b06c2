import pytest
from hypothesis import given, strategies as st

from ntpzip.errors import BadMagic, MalformedFile, OutOfRangeId, TargetTooSmall
from ntpzip.tokenizer import (
    BYTE_KIND,
    WORD_KIND,
    Vocabulary,
    byte_vocabulary,
    decode,
    encode,
    encode_prefix,
    train_word_vocab,
)

_BYTE_PLANE = [bytes([i]) for i in range(256)]


def _word_vocab(*units: bytes) -> Vocabulary:
    return Vocabulary(_BYTE_PLANE + list(units), WORD_KIND)


class TestEncode:
    def test_ascii_bytes_map_to_their_values(self, byte_vocab):
        assert list(encode(b"abc", byte_vocab)) == [97, 98, 99]

    def test_empty_input_gives_empty_stream(self, byte_vocab):
        assert list(encode(b"", byte_vocab)) == []

    def test_multibyte_character_splits_into_bytes(self, byte_vocab):
        assert list(encode("é".encode("utf-8"), byte_vocab)) == [195, 169]

    def test_greedy_longest_match_prefers_longer_unit(self):
        vocab = _word_vocab(b"ab", b"abc")
        ab, abc = vocab.id_of[b"ab"], vocab.id_of[b"abc"]
        assert list(encode(b"abcab", vocab)) == [abc, ab]

    def test_unmatched_bytes_fall_back_to_byte_plane(self):
        vocab = _word_vocab(b"hello")
        assert list(encode(b"xhello!", vocab)) == [120, vocab.id_of[b"hello"], 33]

    def test_longest_match_restarts_after_each_token(self):
        # "aaa" over {"aa"}: greedy takes "aa" then the single "a".
        vocab = _word_vocab(b"aa")
        assert list(encode(b"aaa", vocab)) == [vocab.id_of[b"aa"], 97]

    def test_encode_is_deterministic(self, byte_vocab):
        text = bytes(range(256)) * 3
        assert list(encode(text, byte_vocab)) == list(encode(text, byte_vocab))


class TestEncodePrefix:
    def test_starts_at_the_requested_offset(self, byte_vocab):
        assert list(encode_prefix(b"abcdef", byte_vocab, 2, None)) == [99, 100, 101, 102]

    def test_stops_after_max_tokens(self, byte_vocab):
        assert list(encode_prefix(b"abcdef", byte_vocab, 1, 3)) == [98, 99, 100]

    def test_word_vocab_counts_tokens_not_bytes(self):
        vocab = _word_vocab(b"ab")
        assert list(encode_prefix(b"ababab", vocab, 0, 2)) == [vocab.id_of[b"ab"]] * 2


class TestDecode:
    def test_inverse_of_encode_on_ascii(self, byte_vocab):
        assert decode([97, 98, 99], byte_vocab) == b"abc"

    def test_empty_stream_decodes_to_empty_bytes(self, byte_vocab):
        assert decode([], byte_vocab) == b""

    def test_out_of_range_id_is_rejected(self, byte_vocab):
        with pytest.raises(OutOfRangeId):
            decode([97, 256], byte_vocab)
        with pytest.raises(OutOfRangeId):
            decode([-1], byte_vocab)

    @given(st.lists(st.integers(min_value=0, max_value=255), max_size=200))
    def test_encode_after_decode_reproduces_ids_on_byte_vocab(self, ids):
        vocab = byte_vocabulary()
        assert list(encode(decode(ids, vocab), vocab)) == ids


class TestRoundTrip:
    @given(st.binary(max_size=400))
    def test_byte_vocab_round_trips_any_bytes(self, text):
        vocab = byte_vocabulary()
        assert decode(encode(text, vocab), vocab) == text

    @given(st.binary(max_size=400))
    def test_word_vocab_round_trips_any_bytes(self, text):
        vocab = _word_vocab(b"th", b"the", b" the", b"ab", b"\x00\x01")
        assert decode(encode(text, vocab), vocab) == text

    @given(st.text(max_size=200))
    def test_trained_vocab_round_trips_text(self, text):
        vocab = train_word_vocab(b"the cat sat on the mat " * 20, 300)
        raw = text.encode("utf-8")
        assert decode(encode(raw, vocab), vocab) == raw


class TestVocabularyValidation:
    def test_byte_kind_must_be_exactly_the_byte_plane(self):
        with pytest.raises(ValueError):
            Vocabulary(_BYTE_PLANE + [b"ab"], BYTE_KIND)
        with pytest.raises(ValueError):
            Vocabulary(_BYTE_PLANE[:-1] + [b"zz"], BYTE_KIND)

    def test_word_kind_requires_byte_plane_prefix(self):
        entries = list(_BYTE_PLANE)
        entries[5] = b"oops"
        with pytest.raises(ValueError):
            Vocabulary(entries + [b"unit"], WORD_KIND)

    def test_duplicate_entries_are_rejected(self):
        with pytest.raises(ValueError):
            Vocabulary(_BYTE_PLANE + [b"xy", b"xy"], WORD_KIND)

    def test_unknown_kind_is_rejected(self):
        with pytest.raises(ValueError):
            Vocabulary(_BYTE_PLANE, 7)

    def test_ids_are_dense_and_zero_based(self):
        vocab = _word_vocab(b"qq", b"zz")
        assert [vocab.id_of[e] for e in vocab.entries] == list(range(258))


class TestTrainWordVocab:
    def test_most_frequent_pair_becomes_entry_256(self):
        vocab = train_word_vocab(b"ababab", 258)
        assert vocab.entries[256] == b"ab"
        assert vocab.vocab_size == 258

    def test_repeated_single_byte_merges_with_itself(self):
        vocab = train_word_vocab(b"aaaa", 258)
        assert vocab.entries[256] == b"aa"

    def test_stops_early_when_no_pair_repeats(self):
        vocab = train_word_vocab(b"abcdef", 300)
        assert vocab.vocab_size == 256

    def test_tie_breaks_to_lexicographically_smallest_pair(self):
        # "ab" and "cd" both occur twice; ("a","b") sorts first.
        vocab = train_word_vocab(b"abxcdxabxcd", 258)
        assert vocab.entries[256] == b"ab"

    def test_merged_units_can_merge_again(self):
        vocab = train_word_vocab(b"abab" * 10, 260)
        assert b"ab" in vocab.entries
        assert b"abab" in vocab.entries

    def test_target_below_byte_plane_is_rejected(self):
        with pytest.raises(TargetTooSmall):
            train_word_vocab(b"whatever", 256)

    def test_training_is_deterministic(self):
        corpus = b"the quick brown fox jumps over the lazy dog " * 30
        a = train_word_vocab(corpus, 400)
        b = train_word_vocab(corpus, 400)
        assert a == b
        assert a.fingerprint() == b.fingerprint()


class TestSerialization:
    def test_round_trips_through_bytes(self):
        vocab = _word_vocab(b"ab", b"the", b"\xff\xfe")
        restored = Vocabulary.from_bytes(vocab.to_bytes())
        assert restored == vocab
        assert restored.fingerprint() == vocab.fingerprint()

    def test_byte_vocab_round_trips(self, byte_vocab):
        assert Vocabulary.from_bytes(byte_vocab.to_bytes()) == byte_vocab

    def test_fingerprints_differ_between_vocabularies(self, byte_vocab):
        assert _word_vocab(b"ab").fingerprint() != byte_vocab.fingerprint()

    def test_wrong_magic_is_rejected(self):
        with pytest.raises(BadMagic):
            Vocabulary.from_bytes(b"NOPE1" + b"\x00" * 16)

    def test_truncated_payloads_are_rejected(self):
        blob = _word_vocab(b"abcd").to_bytes()
        with pytest.raises(MalformedFile):
            Vocabulary.from_bytes(blob[:-3])
        with pytest.raises(MalformedFile):
            Vocabulary.from_bytes(blob[:8])

    def test_trailing_garbage_is_rejected(self):
        blob = _word_vocab(b"abcd").to_bytes()
        with pytest.raises(MalformedFile):
            Vocabulary.from_bytes(blob + b"x")

    def test_structurally_invalid_entries_are_rejected(self):
        # A valid envelope whose entries violate the byte-plane invariant.
        import struct

        parts = [b"NTPV1", struct.pack("<BI", WORD_KIND, 2)]
        for entry in (b"zz", b"yy"):
            parts.append(struct.pack("<H", len(entry)) + entry)
        with pytest.raises(MalformedFile):
            Vocabulary.from_bytes(b"".join(parts))
