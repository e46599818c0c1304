"""
Plain-text persistence: CSV for measures, states and matrices, JSON for
Levy triplets. Numbers are written with 17 significant digits so files
read back to the same doubles.
"""
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np
import pandas as pd

from models.bernstein import LevyMeasureKind, LevyMeasureSpec, LevyTriplet
from models.measure import DiscreteMeasure
from models.semigroup import ExtensionPolicy, StateKind, StateVector
from utils.errors import ParseError

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.17g'
SPACING_TOLERANCE = 1e-9  # relative to the grid spacing
SYMMETRY_TOLERANCE = 1e-12  # relative to the largest matrix entry

PathLike = Union[str, Path]


class IOService:

    def _read_csv(self, path: PathLike, **kwargs) -> pd.DataFrame:
        try:
            frame = pd.read_csv(path, float_precision='round_trip', **kwargs)
        except FileNotFoundError:
            raise ParseError(f"no such file: {path}")
        except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
            raise ParseError(f"cannot read {path}: {str(e)}")
        if frame.empty:
            raise ParseError(f"{path} holds no rows")
        return frame

    def _numeric_column(self, frame: pd.DataFrame, column: str, path: PathLike) -> np.ndarray:
        if column not in frame.columns:
            raise ParseError(f"{path} lacks column '{column}' (found {list(frame.columns)})")
        values = pd.to_numeric(frame[column], errors='coerce').to_numpy(dtype=float)
        if not np.all(np.isfinite(values)):
            raise ParseError(f"{path}: column '{column}' has non-numeric or non-finite entries")
        return values

    def write_frame(self, frame: pd.DataFrame, path: Optional[PathLike] = None) -> None:
        """CSV to path, or to stdout when path is None"""
        target = sys.stdout if path is None else path
        frame.to_csv(target, index=False, float_format=FLOAT_FORMAT)
        if path is not None:
            logger.info(f"Wrote {len(frame)} rows to {path}")

    # Measures

    def measure_to_frame(self, measure: DiscreteMeasure) -> pd.DataFrame:
        return pd.DataFrame({'location': measure.locations, 'weight': measure.weights})

    def write_measure(self, measure: DiscreteMeasure, path: Optional[PathLike] = None) -> None:
        self.write_frame(self.measure_to_frame(measure), path)

    def read_measure(self, path: PathLike) -> DiscreteMeasure:
        frame = self._read_csv(path)
        try:
            return DiscreteMeasure(
                locations=self._numeric_column(frame, 'location', path),
                weights=self._numeric_column(frame, 'weight', path)
            )
        except ValueError as e:
            raise ParseError(f"{path}: {str(e)}")

    # Triplets

    def triplet_to_dict(self, f: LevyTriplet) -> Dict[str, Any]:
        measure: Dict[str, Any] = {'kind': f.measure.kind.value}
        if f.measure.kind == LevyMeasureKind.POWER:
            measure['c'] = f.measure.c
            measure['exponent'] = f.measure.exponent
        elif f.measure.kind == LevyMeasureKind.ATOMIC:
            measure['atoms'] = [[location, weight] for location, weight in f.measure.atoms.atoms]
        return {'a': f.a, 'b': f.b, 'measure': measure}

    def triplet_from_dict(self, data: Dict[str, Any]) -> LevyTriplet:
        try:
            measure_data = data.get('measure') or {'kind': 'zero'}
            kind = LevyMeasureKind(measure_data.get('kind', 'zero'))
            if kind == LevyMeasureKind.POWER:
                measure = LevyMeasureSpec.power(c=float(measure_data['c']), exponent=float(measure_data['exponent']))
            elif kind == LevyMeasureKind.ATOMIC:
                atoms = DiscreteMeasure.from_atoms((float(loc), float(w)) for loc, w in measure_data['atoms'])
                measure = LevyMeasureSpec.atomic(atoms)
            else:
                measure = LevyMeasureSpec.zero()
            return LevyTriplet(a=float(data.get('a', 0.0)), b=float(data.get('b', 0.0)), measure=measure)
        except (KeyError, TypeError, AttributeError, ValueError) as e:
            raise ParseError(f"invalid triplet: {str(e)}")

    def read_triplet(self, path: PathLike) -> LevyTriplet:
        try:
            with open(path) as handle:
                data = json.load(handle)
        except FileNotFoundError:
            raise ParseError(f"no such file: {path}")
        except json.JSONDecodeError as e:
            raise ParseError(f"{path} is not valid JSON: {str(e)}")
        if not isinstance(data, dict):
            raise ParseError(f"{path} must hold a JSON object")
        return self.triplet_from_dict(data)

    def write_triplet(self, f: LevyTriplet, path: PathLike) -> None:
        with open(path, 'w') as handle:
            json.dump(self.triplet_to_dict(f), handle, indent=2)

    # Matrices and vectors

    def read_matrix(self, path: PathLike) -> np.ndarray:
        """Headerless CSV of rows; must be square and symmetric"""
        frame = self._read_csv(path, header=None)
        matrix = frame.apply(pd.to_numeric, errors='coerce').to_numpy(dtype=float)
        if not np.all(np.isfinite(matrix)):
            raise ParseError(f"{path}: matrix has non-numeric entries")
        if matrix.shape[0] != matrix.shape[1]:
            raise ParseError(f"{path}: matrix must be square, got {matrix.shape}")
        scale = float(np.max(np.abs(matrix)))
        asymmetry = float(np.max(np.abs(matrix - matrix.T)))
        if asymmetry > SYMMETRY_TOLERANCE * scale:
            raise ParseError(f"{path}: matrix is not symmetric (asymmetry {asymmetry:.3e})")
        return matrix

    def read_vector(self, path: PathLike) -> StateVector:
        """CSV with a 'value' column, or a single headerless column"""
        frame = self._read_csv(path)
        if 'value' in frame.columns:
            values = self._numeric_column(frame, 'value', path)
        else:
            values = self._numeric_column(self._read_csv(path, header=None), 0, path)
        return StateVector.finite(values)

    # Grid functions

    def _uniform_spacing(self, coordinates: np.ndarray, path: PathLike, axis: str) -> float:
        if coordinates.size < 2:
            raise ParseError(f"{path}: need at least two {axis} coordinates")
        steps = np.diff(coordinates)
        spacing = float(np.mean(steps))
        if spacing <= 0 or np.max(np.abs(steps - spacing)) > SPACING_TOLERANCE * spacing:
            raise ParseError(f"{path}: {axis} coordinates are not uniformly spaced and increasing")
        return spacing

    def read_grid(self, path: PathLike, extension: ExtensionPolicy = ExtensionPolicy.CONSTANT_EDGE) -> StateVector:
        """x,value (1-D) or x,y,value (2-D, any row order)"""
        frame = self._read_csv(path)
        values = self._numeric_column(frame, 'value', path)
        x = self._numeric_column(frame, 'x', path)

        if 'y' not in frame.columns:
            spacing = self._uniform_spacing(x, path, 'x')
            return StateVector.grid1d(values, spacing=spacing, extension=extension, origin=float(x[0]))

        y = self._numeric_column(frame, 'y', path)
        table = pd.DataFrame({'x': x, 'y': y, 'value': values})
        if table.duplicated(subset=['x', 'y']).any():
            raise ParseError(f"{path}: repeated grid points")
        samples = table.pivot(index='x', columns='y', values='value').sort_index().sort_index(axis=1)
        if samples.isna().to_numpy().any():
            raise ParseError(f"{path}: grid has missing points")
        x_spacing = self._uniform_spacing(samples.index.to_numpy(dtype=float), path, 'x')
        y_spacing = self._uniform_spacing(samples.columns.to_numpy(dtype=float), path, 'y')
        if abs(x_spacing - y_spacing) > SPACING_TOLERANCE * x_spacing:
            raise ParseError(f"{path}: x spacing {x_spacing} differs from y spacing {y_spacing}")
        return StateVector.grid2d(
            samples.to_numpy(dtype=float),
            spacing=x_spacing,
            extension=extension,
            origin=(float(samples.index[0]), float(samples.columns[0]))
        )

    def state_to_frame(self, state: StateVector) -> pd.DataFrame:
        if state.kind == StateKind.FINITE:
            return pd.DataFrame({'index': np.arange(state.samples.size), 'value': state.samples})
        if state.kind == StateKind.GRID1D:
            return pd.DataFrame({'x': state.axis_coordinates(0), 'value': state.samples})
        x, y = np.meshgrid(state.axis_coordinates(0), state.axis_coordinates(1), indexing='ij')
        return pd.DataFrame({'x': x.ravel(), 'y': y.ravel(), 'value': state.samples.ravel()})

    def write_state(self, state: StateVector, path: Optional[PathLike] = None) -> None:
        self.write_frame(self.state_to_frame(state), path)


# Create a singleton instance for import
io_service = IOService()
