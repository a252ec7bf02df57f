import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from wishart_tw.errors import InputFileError
from wishart_tw.repository.painleve_repository import COLUMNS, PainleveRepository
from wishart_tw.repository.sample_repository import (
    read_matrix_csv,
    read_sample_dump,
    save_json,
    write_csv,
    write_sample_dump,
)
from wishart_tw.service.wishart_service import MonteCarloService


def _table(rows=5):
    s = np.linspace(1.0, -1.0, rows)
    return {col: s * (i + 1) + 1.0 / 3.0 for i, col in enumerate(COLUMNS)}


class TestPainleveRepository:
    def test_round_trip(self, tmp_path):
        repo = PainleveRepository(tmp_path, "x1")
        table = _table()
        path = repo.save(-9.0, 8.0, 1e-12, table)
        assert path.name == "painleve_vx1_-9.0000_+8.0000_1e-12.csv"
        loaded = repo.load(-9.0, 8.0, 1e-12)
        for col in COLUMNS:
            assert_allclose(loaded[col], table[col], rtol=0, atol=0)

    def test_miss(self, tmp_path):
        assert PainleveRepository(tmp_path).load(-9.0, 8.0, 1e-12) is None

    def test_other_version_is_a_miss(self, tmp_path):
        PainleveRepository(tmp_path, "1").save(-9.0, 8.0, 1e-12, _table())
        assert PainleveRepository(tmp_path, "2").load(-9.0, 8.0, 1e-12) is None

    def test_corrupt_file_is_a_miss(self, tmp_path):
        repo = PainleveRepository(tmp_path)
        repo.path_for(-9.0, 8.0, 1e-12).write_text("s,q\n1,not-a-number\n")
        assert repo.load(-9.0, 8.0, 1e-12) is None

    def test_missing_values_are_a_miss(self, tmp_path):
        repo = PainleveRepository(tmp_path)
        header = ",".join(COLUMNS)
        repo.path_for(-9.0, 8.0, 1e-12).write_text(f"{header}\n1,2,3,4,5,6\n0,1,2,,4,5\n")
        assert repo.load(-9.0, 8.0, 1e-12) is None


class TestSampleDump:
    def test_round_trip(self, tmp_path):
        samples = MonteCarloService().run(6, 3, reps=5, k=2, seed=1)
        path = write_sample_dump(tmp_path / "dump.csv", samples)
        loaded = read_sample_dump(path)
        assert [s.seed for s in loaded] == [s.seed for s in samples]
        assert all(s.n == 6 and s.p == 3 and s.k == 2 and s.field == "real" for s in loaded)
        assert_allclose(np.array([s.top for s in loaded]), np.array([s.top for s in samples]), rtol=0, atol=0)

    def test_missing_file(self, tmp_path):
        with pytest.raises(InputFileError):
            read_sample_dump(tmp_path / "absent.csv")

    def test_missing_columns(self, tmp_path):
        path = tmp_path / "dump.csv"
        path.write_text("n,p,l1\n5,5,3.2\n")
        with pytest.raises(InputFileError):
            read_sample_dump(path)

    def test_non_finite_value(self, tmp_path):
        path = tmp_path / "dump.csv"
        path.write_text("n,p,k,field,path,seed,l1\n5,5,1,real,dense,7,nan\n")
        with pytest.raises(InputFileError):
            read_sample_dump(path)


class TestMatrixCsv:
    def test_plain(self, tmp_path):
        path = tmp_path / "x.csv"
        path.write_text("1,2\n3,4\n5,6\n")
        assert_allclose(read_matrix_csv(path), [[1, 2], [3, 4], [5, 6]])

    def test_header_row(self, tmp_path):
        path = tmp_path / "x.csv"
        path.write_text("a,b\n1.5,2\n-3,4e-1\n")
        assert_allclose(read_matrix_csv(path), [[1.5, 2], [-3, 0.4]])

    @pytest.mark.parametrize("content", ["1,2\n3\n", "1\n2,3\n", "1,x\n2,3\n", "1,2\n3,\n", ""])
    def test_rejects_bad_content(self, tmp_path, content):
        path = tmp_path / "x.csv"
        path.write_text(content)
        with pytest.raises(InputFileError):
            read_matrix_csv(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(InputFileError):
            read_matrix_csv(tmp_path / "absent.csv")


class TestWriters:
    def test_write_csv_formats_floats(self, tmp_path):
        path = write_csv(tmp_path / "out" / "t.csv", ["q", "v", "name"], [[0.5, 1 / 3, "a"], [1.0, "", "b"]])
        with open(path, encoding="utf-8") as f:
            assert f.read() == "q,v,name\n0.500000,0.333333,a\n1.000000,,b\n"

    def test_save_json(self, tmp_path):
        path = save_json(tmp_path / "r.json", {"seed": np.int64(3)}, {"values": np.array([1.0, 2.0])})
        with open(path, encoding="utf-8") as f:
            payload = json.load(f)
        assert payload == {"meta": {"seed": 3}, "data": {"values": [1.0, 2.0]}}
