package fixtures.params;

import java.util.List;
import java.util.function.Function;

import com.google.gson.JsonArray;
import com.google.gson.JsonElement;

public class Params {
    public int total(JsonArray array, int extra) {
        return array.size() + extra; //@use com.google.gson.JsonArray.size/0
    }

    public void each(List<JsonElement> items) {
        items.forEach((JsonElement e) -> System.out.println(e.getAsString())); //@use com.google.gson.JsonElement.getAsString/0
    }

    public Function<JsonArray, JsonElement> first() {
        return (JsonArray a) -> a.get(0); //@use com.google.gson.JsonArray.get/1
    }

    public String name(Object array) {
        return array.toString();
    }
}
