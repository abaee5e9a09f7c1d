export { CSV_COLUMNS, parseResultsCsv, ResultRow, SchemaError, X_FIELDS, XField } from "./csv.js";
export { EmptySelectionError, FigureSpec, renderFigure } from "./plot.js";
export { linearScale, logScale, tickLabel } from "./scale.js";
