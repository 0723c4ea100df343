import typer

from app.config import start_logger
from app.router import created_routes

app = typer.Typer(
    help="Distance spectra, 4-cycle counts, key filtering and decoder campaigns for QC-MDPC keys.",
    no_args_is_help=True,
    pretty_exceptions_enable=False,
)


@app.callback()
def startup_event():
    start_logger()


app = created_routes(app)


if __name__ == "__main__":
    app()
