from sosemanuk.main import app

app(prog_name="sosemanuk")
